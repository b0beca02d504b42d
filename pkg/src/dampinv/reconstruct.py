"""
Inversion of one spherical-harmonic channel.

Data u_lk(t) is projected onto the kernel, g(s) = int K(t, s) u_lk(t) dt,
which turns the first-kind equation for c_lk into g = H c_lk with the
compact self-adjoint Gram operator H. The coefficient is then recovered by
the regularised eigen-expansion of H.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi

import numpy as np

from .forward import ModeSeries, ReducedCoefficient
from .grids import RadialGrid
from .kernel import KernelSpec, multiplier_matrix
from .spectral import GramDecomposition, Regularization, regularized_inverse_apply, spectrum_used
from .specfun import ModeIndex, bessel_j


def data_to_g(spec: KernelSpec, series: ModeSeries, sgrid: RadialGrid) -> np.ndarray:
    """g(s_i) = sum_j w_j K(t_j, s_i) u(t_j) over the series' time grid."""
    if series.mode.l != spec.mode.l or series.mode.n != spec.mode.n:
        raise ValueError(f"series for {series.mode} does not match kernel mode {spec.mode}")
    sgrid.check_avoids(spec.model.branch_point)
    tgrid = series.grid
    M = multiplier_matrix(spec.model, tgrid, sgrid)
    return spec.radial_factor(sgrid.nodes) * (M.T @ (tgrid.weights * series.values))


def rel_l2_error(a, b, weights) -> float:
    """sqrt(sum w (a-b)^2) / sqrt(sum w b^2)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    w = np.asarray(weights, dtype=float)
    if not a.shape == b.shape == w.shape:
        raise ValueError("a, b and weights must have equal shapes")
    ref = np.sqrt(np.dot(w, b * b))
    if ref == 0:
        raise ValueError("reference has zero norm")
    return float(np.sqrt(np.dot(w, (a - b) ** 2)) / ref)


@dataclass(frozen=True, eq=False)
class ReconstructionReport:
    mode: ModeIndex
    recovered: ReducedCoefficient
    regularization: Regularization
    spectrum_used: int
    reference: ReducedCoefficient | None = None
    rel_l2_error: float | None = field(default=None)

    def to_dict(self) -> dict:
        return {
            "mode": {"n": self.mode.n, "l": self.mode.l, "k": self.mode.k},
            "alpha": self.recovered.alpha,
            "regularization": {"kind": self.regularization.kind.value, "parameter": self.regularization.parameter},
            "spectrum_used": self.spectrum_used,
            "grid_size": len(self.recovered.grid),
            "rel_l2_error": self.rel_l2_error,
        }


def reconstruct_mode(
    spec: KernelSpec,
    series: ModeSeries,
    dec: GramDecomposition,
    reg: Regularization,
    reference: ReducedCoefficient | None = None,
) -> ReconstructionReport:
    if dec.spec != spec:
        raise ValueError("decomposition was built for a different kernel spec")
    g = data_to_g(spec, series, dec.grid)
    c = regularized_inverse_apply(dec, g, reg)
    recovered = ReducedCoefficient(series.mode, spec.alpha, c, dec.grid)
    err = None
    if reference is not None:
        if reference.grid is not dec.grid and not np.array_equal(reference.grid.nodes, dec.grid.nodes):
            raise ValueError("reference coefficient lives on a different grid")
        err = rel_l2_error(c, reference.values, dec.grid.weights)
    return ReconstructionReport(series.mode, recovered, reg, spectrum_used(dec, reg), reference, err)


@dataclass(frozen=True, eq=False)
class FourierCoefficient:
    """
    fhat_lk(rho) = (2 pi)^{-n/2} i^l rho^{alpha - n/2} c_lk(rho), stored as a
    real array times i^(l mod 2): `values` holds the real or imaginary part.
    """

    mode: ModeIndex
    values: np.ndarray
    imaginary: bool

    @property
    def complex_values(self) -> np.ndarray:
        return self.values * (1j if self.imaginary else 1.0)


def fourier_coefficient(coeff: ReducedCoefficient) -> FourierCoefficient:
    n, l = coeff.mode.n, coeff.mode.l
    rho = coeff.grid.nodes
    # i^l = (+1, i, -1, -i) for l mod 4 = 0..3
    sign = -1.0 if (l % 4) in (2, 3) else 1.0
    vals = sign * (2 * pi) ** (-n / 2) * rho ** (coeff.alpha - n / 2) * coeff.values
    return FourierCoefficient(coeff.mode, vals, bool(l % 2))


def hankel_synthesize(coeff: ReducedCoefficient, rgrid) -> np.ndarray:
    """
    Radial profile f_lk(r) = r^{-(n-2)/2} int_0^inf c_lk(rho) rho^alpha J_nu(r rho) d rho
    of the initial velocity, in the convention u = int e^{ix.xi} m fhat d xi.
    """
    r = np.asarray(rgrid, dtype=float)
    if np.any(r <= 0):
        raise ValueError("radii must be positive")
    n = coeff.mode.n
    rho, w = coeff.grid.nodes, coeff.grid.weights
    J = bessel_j(coeff.mode.nu, np.outer(r, rho))
    return r ** (-(n - 2) / 2) * (J @ (w * rho**coeff.alpha * coeff.values))


def hankel_analyze(profile, r_nodes, r_weights, mode: ModeIndex, alpha: float, grid: RadialGrid) -> ReducedCoefficient:
    """
    Inverse of `hankel_synthesize`: c(rho) = rho^{1-alpha} int_0^inf r^{n/2} f(r) J_nu(r rho) dr,
    with the r integral done by the supplied quadrature.
    """
    r = np.asarray(r_nodes, dtype=float)
    w = np.asarray(r_weights, dtype=float)
    profile = np.asarray(profile, dtype=float)
    rho = grid.nodes
    J = bessel_j(mode.nu, np.outer(rho, r))
    vals = rho ** (1 - alpha) * (J @ (w * r ** (mode.n / 2) * profile))
    return ReducedCoefficient(mode, alpha, vals, grid)
