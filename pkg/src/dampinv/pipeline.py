"""
End-to-end runs: phantom -> forward -> (noise) -> kernel -> eig -> reconstruct.

A run directory holds

    manifest.json               configuration, grid sizes, file digests
    gram_<l>.csv                B = W^1/2 H W^1/2 for degree l
    eig_values_<l>.csv          eigenvalues, descending
    eig_vectors_<l>.csv         eigenvectors of B, one per column
    mode_<l>_<k>_u.csv          columns t, weight, u_lk(t)
    mode_<l>_<k>_recon.csv      columns rho, weight, recovered, reference
    report.json                 per-mode errors

Kernel and eigen files are reused by later invocations when the manifest
records the same kernel configuration and the file digests still match.
"""

from __future__ import annotations

import dataclasses
import datetime as _dt
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .forward import (
    ModeSeries,
    add_noise,
    analyze_sphere,
    forward_mode,
    sphere_layout,
    synthesize_sphere,
)
from .grids import RadialGrid, TimeGrid, adaptive_time_grid, radial_grid
from .io import MatrixFormatError, file_digest, load_matrix, read_json, save_matrix, write_json
from .kernel import GramMatrix, KernelSpec, assemble_gram_matrix
from .model import DampingModel
from .phantom import PhantomSpec, phantom_coeff
from .reconstruct import ReconstructionReport, reconstruct_mode
from .spectral import GramDecomposition, Regularization, eig_sym
from .specfun import ModeIndex, modes_up_to

log = logging.getLogger(__name__)

DEFAULT_ALPHA = {"strong": 1.5, "weak": 0.75}


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass
class RunConfig:
    model: str = "strong"
    gamma: float | None = None
    delta: float | None = None
    n: int = 3
    lmax: int = 0
    alpha: float | None = None
    rmax: float = 12.0
    tmax: float | None = None
    panels: int = 16
    order: int = 16
    time_tol: float = 1e-15
    reg: str = "tsvd"
    reg_param: float = 1e-8
    phantom: str = "gauss"
    amplitude: float = 1.0
    width: float = 1.0
    center: float = 0.0
    expr: str | None = None
    seed: int = 0
    noise_sigma: float = 0.0
    noise_relative: bool = False
    workers: int = 1

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        return cls(**data)

    def check(self) -> "RunConfig":
        if self.model not in ("weak", "strong"):
            raise ConfigError(f"model must be 'weak' or 'strong', got {self.model!r}")
        if self.model == "weak" and self.delta is not None:
            raise ConfigError("--delta given for the weak model; use --gamma")
        if self.model == "strong" and self.gamma is not None:
            raise ConfigError("--gamma given for the strong model; use --delta")
        if self.n < 2:
            raise ConfigError("n must be >= 2")
        if self.lmax < 0:
            raise ConfigError("lmax must be >= 0")
        if self.rmax <= 0 or self.panels < 1 or self.order < 1:
            raise ConfigError("rmax, panels and order must be positive")
        if self.tmax is not None and self.tmax <= 0:
            raise ConfigError("tmax must be positive")
        if self.reg not in ("tsvd", "tikhonov") or not self.reg_param > 0:
            raise ConfigError("reg must be tsvd|tikhonov with a positive --reg-param")
        if self.noise_sigma < 0:
            raise ConfigError("noise sigma must be nonnegative")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        try:
            self.damping_model()
            self.phantom_spec()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self

    def damping_model(self) -> DampingModel:
        if self.model == "weak":
            return DampingModel.weak(1.0 if self.gamma is None else self.gamma)
        return DampingModel.strong(1.0 if self.delta is None else self.delta)

    @property
    def resolved_alpha(self) -> float:
        return DEFAULT_ALPHA[self.model] if self.alpha is None else float(self.alpha)

    def regularization(self) -> Regularization:
        return Regularization(self.reg, self.reg_param)

    def phantom_spec(self) -> PhantomSpec:
        return PhantomSpec(self.phantom, self.amplitude, self.width, self.center, self.expr)

    def kernel_key(self) -> dict:
        m = self.damping_model()
        return {
            "model": m.kind.value,
            "parameter": m.parameter,
            "n": self.n,
            "alpha": self.resolved_alpha,
            "rmax": self.rmax,
            "panels": self.panels,
            "order": self.order,
        }


@dataclass
class RunManifest:
    config: dict
    kernel: dict
    alpha_window: list
    alpha_in_window: bool
    time_grid: dict
    version: str = __version__
    digests: dict = field(default_factory=dict)
    created: str = ""

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def mode_seed(seed: int, mode: ModeIndex) -> int:
    return seed * 1_000_003 + 1_000 * mode.l + mode.k


class Run:
    """A run directory plus the grids and objects built for it."""

    def __init__(self, config: RunConfig, out):
        self.config = config.check()
        self.out = Path(out)
        self.model = config.damping_model()
        self.alpha = config.resolved_alpha
        self.modes = modes_up_to(config.n, config.lmax)
        self.rgrid: RadialGrid = radial_grid(config.rmax, config.panels, config.order)
        try:
            self.rgrid.check_avoids(self.model.branch_point)
        except ValueError as exc:
            raise ConfigError(f"{exc}; change --rmax or --panels") from None
        self._tgrid: TimeGrid | None = None
        self.previous = self._load_previous()
        lo, hi = self.model.admissible_alpha(config.n)
        self.manifest = RunManifest(
            config=dataclasses.asdict(config),
            kernel=config.kernel_key(),
            alpha_window=[lo, hi],
            alpha_in_window=bool(lo < self.alpha < hi),
            time_grid={},
        )
        self._grams: dict[int, GramMatrix] = {}
        if self.previous is not None:
            digests = dict(self.previous.get("digests", {}))
            if self.previous.get("kernel") != self.manifest.kernel:
                digests = {k: v for k, v in digests.items() if not k.startswith(("gram_", "eig_"))}
            self.manifest.digests = digests
            self.manifest.time_grid = dict(self.previous.get("time_grid", {}))

    def _load_previous(self):
        path = self.out / "manifest.json"
        if path.exists():
            try:
                return read_json(path)
            except ValueError:
                log.warning("ignoring unreadable manifest %s", path)
        return None

    def spec(self, l: int) -> KernelSpec:
        return KernelSpec(self.model, ModeIndex(self.config.n, l, 0), self.alpha)

    @property
    def tgrid(self) -> TimeGrid:
        if self._tgrid is None:
            nu0 = (self.config.n - 2) / 2
            rho = self.rgrid.nodes
            envelope = rho**self.alpha * np.minimum(1.0, rho) ** nu0
            self._tgrid = adaptive_time_grid(
                self.model, self.rgrid, self.config.order, self.config.time_tol, self.config.tmax, envelope
            )
        return self._tgrid

    def reference(self, mode: ModeIndex):
        # scaled by 1/(1+k) so that channel mix-ups within a degree are visible
        c = phantom_coeff(self.config.phantom_spec(), mode, self.alpha, self.rgrid)
        return c * (1.0 / (1 + mode.k))

    def path(self, name: str) -> Path:
        return self.out / name

    def record(self, path: Path):
        self.manifest.digests[path.name] = file_digest(path)

    def reusable(self, *names: str) -> bool:
        prev = self.previous
        if prev is None or prev.get("kernel") != self.manifest.kernel:
            return False
        digests = prev.get("digests", {})
        for name in names:
            p = self.path(name)
            if not p.exists() or digests.get(name) != file_digest(p):
                return False
        return True

    def write_manifest(self):
        self.manifest.created = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        write_json(self.path("manifest.json"), self.manifest.to_dict())

    def _map(self, fn, items):
        if self.config.workers == 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(self.config.workers) as pool:
            return list(pool.map(fn, items))

    # stages

    def simulate(self) -> dict[ModeIndex, ModeSeries]:
        cfg = self.config
        tgrid = self.tgrid
        coeffs = [self.reference(m) for m in self.modes]
        series = self._map(lambda c: forward_mode(self.model, c, tgrid), coeffs)
        if cfg.n in (2, 3):
            layout = sphere_layout(cfg.n, cfg.lmax)
            field_ = synthesize_sphere(series, layout.directions)
            series = analyze_sphere(field_, layout, cfg.lmax, tgrid)
        if cfg.noise_sigma > 0:
            noisy = []
            for s in series:
                sigma = cfg.noise_sigma * (np.abs(s.values).max() if cfg.noise_relative else 1.0)
                noisy.append(add_noise(s, sigma, mode_seed(cfg.seed, s.mode)))
            series = noisy
        for s in series:
            p = save_matrix(
                self.path(f"mode_{s.mode.l}_{s.mode.k}_u.csv"),
                np.column_stack([tgrid.nodes, tgrid.weights, s.values]),
            )
            self.record(p)
        self.manifest.time_grid = {"T": tgrid.upper, "nodes": len(tgrid), "panels": len(tgrid.edges) - 1}
        return {s.mode: s for s in series}

    def load_series(self) -> dict[ModeIndex, ModeSeries]:
        out = {}
        grid = None
        for m in self.modes:
            path = self.path(f"mode_{m.l}_{m.k}_u.csv")
            data = load_matrix(path)
            if data.shape[1] != 3:
                raise MatrixFormatError("mode files need 3 columns (t, weight, u)", path)
            if grid is None:
                T = self.manifest.time_grid.get("T", float(data[-1, 0]))
                grid = TimeGrid(data[:, 0], data[:, 1], T)
            elif not np.array_equal(grid.nodes, data[:, 0]):
                raise MatrixFormatError("time column differs from the other mode files", path)
            out[m] = ModeSeries(m, data[:, 2], grid)
        return out

    def gram(self, l: int) -> GramMatrix:
        if l in self._grams:
            return self._grams[l]
        name = f"gram_{l}.csv"
        spec = self.spec(l)
        if self.reusable(name):
            log.info("reusing %s", name)
            B = load_matrix(self.path(name))
            B.setflags(write=False)
            G = GramMatrix(B, self.rgrid, spec)
        else:
            G = assemble_gram_matrix(spec, self.rgrid)
            self.record(save_matrix(self.path(name), G.values))
        self._grams[l] = G
        return G

    def decomposition(self, l: int) -> GramDecomposition:
        vals_name, vecs_name = f"eig_values_{l}.csv", f"eig_vectors_{l}.csv"
        if self.reusable(vals_name, vecs_name):
            log.info("reusing eigenpairs for l=%d", l)
            lam = load_matrix(self.path(vals_name))[:, 0]
            V = load_matrix(self.path(vecs_name))
            return GramDecomposition(lam, V, self.rgrid, self.spec(l))
        dec = eig_sym(self.gram(l))
        self.record(save_matrix(self.path(vals_name), dec.eigenvalues))
        self.record(save_matrix(self.path(vecs_name), dec.eigenvectors))
        return dec

    def invert(self, series: dict[ModeIndex, ModeSeries]) -> list[ReconstructionReport]:
        reg = self.config.regularization()
        decs = {l: self.decomposition(l) for l in sorted({m.l for m in self.modes})}

        def one(m: ModeIndex) -> ReconstructionReport:
            return reconstruct_mode(self.spec(m.l), series[m], decs[m.l], reg, self.reference(m))

        reports = self._map(one, self.modes)
        for r in reports:
            p = save_matrix(
                self.path(f"mode_{r.mode.l}_{r.mode.k}_recon.csv"),
                np.column_stack(
                    [self.rgrid.nodes, self.rgrid.weights, r.recovered.values, r.reference.values]
                ),
            )
            self.record(p)
        errors = [r.rel_l2_error for r in reports]
        report = {
            "version": __version__,
            "modes": [r.to_dict() for r in reports],
            "max_rel_l2_error": max(errors) if errors else None,
        }
        self.record(write_json(self.path("report.json"), report))
        return reports


def run_pipeline(config: RunConfig, out) -> tuple[list[ReconstructionReport], RunManifest]:
    run = Run(config, out)
    run.out.mkdir(parents=True, exist_ok=True)
    if not run.manifest.alpha_in_window:
        log.warning("alpha=%s is outside the admissible window %s", run.alpha, run.manifest.alpha_window)
    series = run.simulate()
    for l in sorted({m.l for m in run.modes}):
        run.gram(l)
    reports = run.invert(series)
    run.write_manifest()
    return reports, run.manifest
