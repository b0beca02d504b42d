"""
Plain-text persistence.

Matrices are CSV with a "# rows cols" header and floats printed in their
shortest round-trip form, so save/load is value exact. Manifests and
reports are JSON with sorted keys.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np


class MatrixFormatError(ValueError):
    """Malformed matrix file. `row` is the 1-based data row, or 0 for the header."""

    def __init__(self, message: str, path=None, row: int = 0):
        self.path = path
        self.row = row
        where = f"{path}: " if path is not None else ""
        super().__init__(f"{where}{'header' if row == 0 else f'row {row}'}: {message}")


def _fmt(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot store non-finite value {x}")
    return repr(x)


def save_matrix(path, matrix) -> Path:
    a = np.asarray(matrix, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ValueError("only 1-d and 2-d arrays can be saved")
    path = Path(path)
    lines = [f"# {a.shape[0]} {a.shape[1]}"]
    lines += [",".join(_fmt(x) for x in row) for row in a]
    path.write_text("\n".join(lines) + "\n")
    return path


def load_matrix(path) -> np.ndarray:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise MatrixFormatError("empty file", path)
    head = lines[0].split()
    if len(head) != 3 or head[0] != "#":
        raise MatrixFormatError(f"expected '# rows cols', got {lines[0]!r}", path)
    try:
        rows, cols = int(head[1]), int(head[2])
    except ValueError:
        raise MatrixFormatError(f"non-integer shape in {lines[0]!r}", path) from None
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != rows:
        raise MatrixFormatError(f"header declares {rows} rows, found {len(body)}", path)
    out = np.empty((rows, cols))
    for i, ln in enumerate(body, start=1):
        tokens = ln.split(",")
        if len(tokens) != cols:
            raise MatrixFormatError(f"expected {cols} values, found {len(tokens)}", path, i)
        for j, tok in enumerate(tokens):
            try:
                v = float(tok)
            except ValueError:
                raise MatrixFormatError(f"bad number {tok!r}", path, i) from None
            if not math.isfinite(v):
                raise MatrixFormatError(f"non-finite value {tok!r}", path, i)
            out[i - 1, j] = v
    return out


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def write_json(path, data) -> Path:
    path = Path(path)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())
