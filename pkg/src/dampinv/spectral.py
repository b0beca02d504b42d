"""
Eigendecomposition of the discretised Gram operator and regularised
application of its inverse.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .grids import RadialGrid
from .kernel import GramMatrix, KernelSpec


class EmptySpectrumWarning(UserWarning):
    """Every eigencomponent was discarded by the regularisation."""


@dataclass(frozen=True, eq=False)
class GramDecomposition:
    """
    Eigenpairs of B = W^{1/2} H W^{1/2}, eigenvalues descending.

    Columns of `eigenvectors` are orthonormal in the Euclidean sense, which is
    the weighted L2 inner product for the grid functions
    v_h(rho_j) = eigenvectors[j, h] / sqrt(w_j).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    grid: RadialGrid
    spec: KernelSpec

    def grid_functions(self) -> np.ndarray:
        return self.eigenvectors / np.sqrt(self.grid.weights)[:, None]

    def rebuild(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


def _fix_signs(V: np.ndarray) -> np.ndarray:
    # first component with magnitude above 1e-12 of the column max is positive
    mags = np.abs(V)
    first = np.argmax(mags > 1e-12 * mags.max(axis=0), axis=0)
    signs = np.sign(V[first, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def eig_sym(matrix: GramMatrix) -> GramDecomposition:
    B = np.asarray(matrix.values, dtype=float)
    if not np.all(np.isfinite(B)):
        raise ValueError("Gram matrix has non-finite entries")
    if not np.array_equal(B, B.T):
        raise ValueError("Gram matrix is not symmetric")
    lam, V = np.linalg.eigh(B)
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    V = _fix_signs(V[:, order])
    lam.setflags(write=False)
    V.setflags(write=False)
    return GramDecomposition(lam, V, matrix.grid, matrix.spec)


class RegularizationKind(str, enum.Enum):
    TRUNCATED = "tsvd"
    TIKHONOV = "tikhonov"


@dataclass(frozen=True)
class Regularization:
    kind: RegularizationKind = RegularizationKind.TRUNCATED
    parameter: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "kind", RegularizationKind(self.kind))
        if not self.parameter > 0:
            raise ValueError("regularisation parameter must be positive")

    @classmethod
    def truncated(cls, tau: float = 1e-8) -> "Regularization":
        return cls(RegularizationKind.TRUNCATED, tau)

    @classmethod
    def tikhonov(cls, mu: float) -> "Regularization":
        return cls(RegularizationKind.TIKHONOV, mu)


def filter_factors(dec: GramDecomposition, reg: Regularization) -> np.ndarray:
    """Replacement for 1/lambda_h under the chosen regularisation."""
    lam = dec.eigenvalues
    if reg.kind is RegularizationKind.TRUNCATED:
        keep = lam >= reg.parameter * lam[0]
        out = np.zeros_like(lam)
        out[keep] = 1.0 / lam[keep]
        return out
    mu = reg.parameter
    return lam / (lam * lam + mu * mu)


def spectrum_used(dec: GramDecomposition, reg: Regularization) -> int:
    if reg.kind is RegularizationKind.TRUNCATED:
        return int(np.count_nonzero(dec.eigenvalues >= reg.parameter * dec.eigenvalues[0]))
    return int(dec.eigenvalues.size)


def regularized_inverse_apply(dec: GramDecomposition, g, reg: Regularization) -> np.ndarray:
    """
    Stabilised sum_h filt(lambda_h) <g, v_h> v_h, returned as a grid function.

    Inner products use the quadrature weights, so for g = H c the result
    approximates c.
    """
    g = np.asarray(g, dtype=float)
    if g.shape != dec.grid.nodes.shape:
        raise ValueError(f"g has {g.size} values for a grid of {len(dec.grid)} nodes")
    factors = filter_factors(dec, reg)
    if not np.any(factors):
        warnings.warn("regularisation discarded the whole spectrum", EmptySpectrumWarning, stacklevel=2)
        return np.zeros_like(g)
    sw = np.sqrt(dec.grid.weights)
    V = dec.eigenvectors
    y = V @ (factors * (V.T @ (sw * g)))
    return y / sw
