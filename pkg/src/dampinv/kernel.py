"""
Fredholm kernel K(t, rho) = m(t, rho) rho^alpha J_nu(rho) and its Gram kernel
H(s, rho) = int_0^inf K(t, s) K(t, rho) dt.

The time integral inside H is done in closed form (see
`model.product_time_integral`), so H factorises as

    H(s, rho) = (s rho)^alpha J_nu(s) J_nu(rho) I(s, rho).
"""

from __future__ import annotations

import functools
import warnings
from dataclasses import dataclass

import numpy as np

from .grids import RadialGrid, TimeGrid, gauss_legendre_panels
from .model import DampingModel, multiplier, multiplier_time_l2, product_time_integral
from .specfun import ModeIndex, bessel_j


class AlphaWindowWarning(UserWarning):
    """alpha lies outside the window where the kernel is known to be square integrable."""


@dataclass(frozen=True)
class KernelSpec:
    model: DampingModel
    mode: ModeIndex
    alpha: float

    def __post_init__(self):
        if not np.isfinite(self.alpha):
            raise ValueError("alpha must be finite")

    @property
    def window(self) -> tuple[float, float]:
        return self.model.admissible_alpha(self.mode.n)

    @property
    def in_window(self) -> bool:
        lo, hi = self.window
        return lo < self.alpha < hi

    @property
    def nu(self) -> float:
        return self.mode.nu

    def warn_if_outside(self):
        if not self.in_window:
            lo, hi = self.window
            warnings.warn(
                f"alpha={self.alpha} outside ({lo:g}, {hi:g}) for the {self.model.kind.value} "
                f"model at n={self.mode.n}; square integrability of the kernel is not guaranteed",
                AlphaWindowWarning,
                stacklevel=3,
            )

    def radial_factor(self, rho):
        """rho^alpha J_nu(rho)."""
        rho = np.asarray(rho, dtype=float)
        return rho**self.alpha * bessel_j(self.nu, rho)


def kernel_K(spec: KernelSpec, t, rho):
    """K(t, rho) for broadcastable t >= 0, rho > 0."""
    return multiplier(spec.model, t, rho) * spec.radial_factor(rho)


def gram_H(spec: KernelSpec, s, rho):
    """Gram kernel H(s, rho); symmetric, with H(rho, rho) >= 0."""
    out = spec.radial_factor(s) * spec.radial_factor(rho) * product_time_integral(spec.model, s, rho)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """B = W^{1/2} H W^{1/2} on a radial grid."""

    values: np.ndarray
    grid: RadialGrid
    spec: KernelSpec

    @property
    def sqrt_weights(self) -> np.ndarray:
        return np.sqrt(self.grid.weights)

    def apply(self, c) -> np.ndarray:
        """Discretised (H c)(rho_i) = sum_j H(rho_i, rho_j) w_j c_j."""
        sw = self.sqrt_weights
        return (self.values @ (sw * np.asarray(c, dtype=float))) / sw


def assemble_gram_matrix(spec: KernelSpec, grid: RadialGrid) -> GramMatrix:
    if len(grid) == 0:
        raise ValueError("empty grid")
    grid.check_avoids(spec.model.branch_point)
    spec.warn_if_outside()
    rho = grid.nodes
    x = np.sqrt(grid.weights) * spec.radial_factor(rho)
    core = product_time_integral(spec.model, rho[:, None], rho[None, :])
    B = x[:, None] * core * x[None, :]
    # mirror the upper triangle so the matrix is symmetric bit for bit
    B = np.triu(B) + np.triu(B, 1).T
    B.setflags(write=False)
    return GramMatrix(B, grid, spec)


@functools.lru_cache(maxsize=2)
def _multiplier_matrix(model: DampingModel, tgrid: TimeGrid, rgrid: RadialGrid) -> np.ndarray:
    M = multiplier(model, tgrid.nodes[:, None], rgrid.nodes[None, :])
    M.setflags(write=False)
    return M


def multiplier_matrix(model: DampingModel, tgrid: TimeGrid, rgrid: RadialGrid) -> np.ndarray:
    """m(t_i, rho_j) on the product grid; cached for the most recent grids."""
    return _multiplier_matrix(model, tgrid, rgrid)


def _rho_panels(rho_min: float, R: float, width: float) -> np.ndarray:
    edges = []
    lo = rho_min
    if rho_min == 0.0:
        # geometric grading resolves integrable power singularities at 0
        top = min(width, R)
        edges = list(top * 2.0 ** -np.arange(60, 0, -1))
        lo = top
        edges = [0.0] + edges
    count = max(1, int(np.ceil((R - lo) / width)))
    edges += list(np.linspace(lo, R, count + 1))
    return np.unique(np.asarray(edges))


def kernel_l2_norm(
    spec: KernelSpec,
    R: float,
    T: float | None = None,
    rho_min: float = 0.0,
    width: float = 0.25,
    order: int = 16,
) -> float:
    """
    Squared L2 norm of K over [0, T] x [rho_min, R].

    The time integral is exact (T=None means infinite horizon); only the
    frequency integral is numeric.
    """
    if R <= 0 or (T is not None and T <= 0) or not 0 <= rho_min < R:
        raise ValueError("need R > 0, T > 0 and 0 <= rho_min < R")
    nodes, weights = gauss_legendre_panels(_rho_panels(rho_min, R, width), order)
    integrand = spec.radial_factor(nodes) ** 2 * multiplier_time_l2(spec.model, nodes, T)
    return float(np.dot(weights, integrand))
