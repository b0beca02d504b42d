"""
Forward map from radial coefficients to boundary data on the unit sphere.

Per mode, u_lk(t) = int_0^inf K(t, rho) c_lk(rho) d rho with the reduced real
coefficient c_lk = (2 pi)^{n/2} i^{-l} fhat_lk(rho) rho^{n/2 - alpha}. For real
initial data fhat_lk is real for even l and imaginary for odd l, so c_lk is
always real and the whole pipeline stays in real arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from .grids import RadialGrid, TimeGrid
from .kernel import KernelSpec, multiplier_matrix
from .model import DampingModel
from .specfun import ModeIndex, UnsupportedDimensionError, sph_harmonic_matrix


@dataclass(frozen=True, eq=False)
class ReducedCoefficient:
    mode: ModeIndex
    alpha: float
    values: np.ndarray
    grid: RadialGrid

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise ValueError(
                f"coefficient has {values.size} values for a grid of {len(self.grid)} nodes"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("coefficient values must be finite")
        object.__setattr__(self, "values", values)

    def l2_norm(self) -> float:
        return float(np.sqrt(self.grid.integrate(self.values**2)))

    def __mul__(self, factor: float) -> "ReducedCoefficient":
        return ReducedCoefficient(self.mode, self.alpha, factor * self.values, self.grid)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class ModeSeries:
    mode: ModeIndex
    values: np.ndarray
    grid: TimeGrid

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise ValueError(
                f"series has {values.size} values for a time grid of {len(self.grid)} nodes"
            )
        object.__setattr__(self, "values", values)

    def __mul__(self, factor: float) -> "ModeSeries":
        return ModeSeries(self.mode, factor * self.values, self.grid)

    __rmul__ = __mul__


def forward_mode(model: DampingModel, coeff: ReducedCoefficient, tgrid: TimeGrid) -> ModeSeries:
    """u_lk(t_i) = sum_j w_j K(t_i, rho_j) c(rho_j)."""
    spec = KernelSpec(model, coeff.mode, coeff.alpha)
    spec.warn_if_outside()
    rgrid = coeff.grid
    rgrid.check_avoids(model.branch_point)
    M = multiplier_matrix(model, tgrid, rgrid)
    u = M @ (rgrid.weights * spec.radial_factor(rgrid.nodes) * coeff.values)
    return ModeSeries(coeff.mode, u, tgrid)


def forward_modes(model: DampingModel, coeffs, tgrid: TimeGrid) -> list[ModeSeries]:
    return [forward_mode(model, c, tgrid) for c in coeffs]


@dataclass(frozen=True, eq=False)
class SphereLayout:
    """Detector directions on S^{n-1} with quadrature weights."""

    n: int
    directions: np.ndarray
    weights: np.ndarray

    @property
    def max_degree(self) -> int:
        """Largest l_max for which analysis of degree <= l_max fields is exact."""
        if self.n == 2:
            return (len(self.weights) - 1) // 2
        n_phi = len(np.unique(np.round(self.directions[:, 2], 14)))
        n_az = len(self.weights) // n_phi
        return min(n_phi - 1, (n_az - 1) // 2)


def sphere_layout(n: int, l_max: int) -> SphereLayout:
    """
    Minimal exact layout for band limit l_max.

    n=2: 2 l_max + 1 equiangular points. n=3: (l_max + 1) Gauss-Legendre
    colatitudes times 2 l_max + 1 equiangular longitudes.
    """
    if n == 2:
        m = 2 * l_max + 1
        theta = 2 * pi * np.arange(m) / m
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        return SphereLayout(2, dirs, np.full(m, 2 * pi / m))
    if n == 3:
        z, wz = np.polynomial.legendre.leggauss(l_max + 1)
        m = 2 * l_max + 1
        phi = 2 * pi * np.arange(m) / m
        s = np.sqrt(1 - z * z)
        dirs = np.stack(
            [
                (s[:, None] * np.cos(phi)[None, :]).ravel(),
                (s[:, None] * np.sin(phi)[None, :]).ravel(),
                np.repeat(z, m),
            ],
            axis=1,
        )
        # renormalise to unit length exactly enough for the 1e-12 check
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        return SphereLayout(3, dirs, np.repeat(wz, m) * (2 * pi / m))
    raise UnsupportedDimensionError(f"no detector layout for n={n}")


def synthesize_sphere(
    modes: list[ModeSeries], directions, n: int | None = None, tgrid: TimeGrid | None = None
) -> np.ndarray:
    """
    u(theta_i, t_j) = sum_{l,k} u_lk(t_j) Y_lk(theta_i); shape (directions, times).

    An empty mode list gives the zero field on `tgrid` (zero columns without one).
    """
    directions = np.asarray(directions, dtype=float)
    if not modes:
        return np.zeros((directions.shape[0], 0 if tgrid is None else len(tgrid)))
    dims = {s.mode.n for s in modes}
    if len(dims) > 1:
        raise ValueError(f"mixed dimensions across modes: {sorted(dims)}")
    dim = dims.pop()
    if n is not None and n != dim:
        raise ValueError(f"modes are in dimension {dim}, not {n}")
    grid = modes[0].grid
    if any(s.grid is not grid for s in modes[1:]):
        raise ValueError("all modes must share one TimeGrid")
    l_max = max(s.mode.l for s in modes)
    Y, all_modes = sph_harmonic_matrix(dim, l_max, directions)
    col = {m: i for i, m in enumerate(all_modes)}
    Ysel = Y[:, [col[s.mode] for s in modes]]
    U = np.stack([s.values for s in modes])
    return Ysel @ U


def analyze_sphere(samples, layout: SphereLayout, l_max: int, tgrid: TimeGrid) -> list[ModeSeries]:
    """u_lk(t_j) = sum_i q_i u(theta_i, t_j) Y_lk(theta_i) for every l <= l_max."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (len(layout.weights), len(tgrid)):
        raise ValueError(
            f"samples shape {samples.shape} does not match "
            f"({len(layout.weights)} detectors, {len(tgrid)} times)"
        )
    if l_max > layout.max_degree:
        raise ValueError(
            f"{len(layout.weights)} detectors resolve degree <= {layout.max_degree}, "
            f"requested l_max={l_max}"
        )
    Y, modes = sph_harmonic_matrix(layout.n, l_max, layout.directions)
    coeffs = (Y * layout.weights[:, None]).T @ samples
    return [ModeSeries(m, coeffs[i], tgrid) for i, m in enumerate(modes)]


def add_noise(series: ModeSeries, sigma: float, seed: int) -> ModeSeries:
    """Add i.i.d. N(0, sigma^2) noise; deterministic for a fixed seed."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0:
        return ModeSeries(series.mode, series.values.copy(), series.grid)
    rng = np.random.default_rng(seed)
    noisy = series.values + rng.normal(0.0, sigma, size=series.values.shape)
    return ModeSeries(series.mode, noisy, series.grid)
