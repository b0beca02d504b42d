"""
Identity suite run by `dampinv validate`.

Every check compares a closed form from the model against an independent
numeric evaluation (adaptive quadrature, finite differences, or a direct
matrix property) and reports pass/fail at a fixed tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .grids import radial_grid
from .kernel import KernelSpec, assemble_gram_matrix
from .model import (
    DampingModel,
    decay_rates,
    multiplier,
    multiplier_dt,
    multiplier_time_l2,
    product_time_integral,
    strong_sine_square_integral,
)
from .spectral import eig_sym
from .specfun import ModeIndex, harmonic_dim


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _rel(a, b) -> float:
    return abs(a - b) / abs(b)


def numeric_time_l2(model: DampingModel, rho: float, tail: float = 1e-12) -> float:
    """int_0^T m^2 dt by adaptive quadrature, T from the slowest decay rate."""
    slow, _, omega = decay_rates(model, rho)
    T = np.log(1 / tail) / (2 * float(slow))
    # split into pieces short enough for the oscillation and decay scales
    scale = min(1.0 / float(slow), 2 * np.pi / float(omega) if omega > 0 else np.inf)
    edges = np.linspace(0.0, T, int(np.ceil(T / scale)) + 1)
    return sum(
        integrate.quad(lambda t: multiplier(model, t, rho) ** 2, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
        for a, b in zip(edges[:-1], edges[1:])
    )


def check_harmonic_dim() -> Check:
    got = harmonic_dim(3, 0), harmonic_dim(3, 2), harmonic_dim(2, 3)
    return Check("harmonic dimension d(n,l)", got == (1, 5, 2), f"d(3,0),d(3,2),d(2,3) = {got}")


def check_time_l2_closed_form() -> Check:
    worst = 0.0
    cases = []
    for model in (DampingModel.strong(1.0), DampingModel.strong(3.0), DampingModel.weak(1.0), DampingModel.weak(2.0)):
        b = model.branch_point
        for rho in (0.3 * b, b * (1 - 1e-3), b * (1 + 1e-3), 2.5 * b):
            err = _rel(numeric_time_l2(model, rho), multiplier_time_l2(model, rho))
            worst = max(worst, err)
            cases.append(err)
    known = (multiplier_time_l2(DampingModel.strong(1.0), 1.0), multiplier_time_l2(DampingModel.strong(1.0), 3.0))
    exact = abs(known[0] - 0.5) < 1e-15 and abs(known[1] - 1 / 162) < 1e-15
    return Check(
        "int m^2 dt = 1/(2 delta rho^4) | 1/(2 gamma rho^2)",
        worst < 1e-6 and exact,
        f"max rel err vs quadrature {worst:.2e} over {len(cases)} cases; strong rho=1 -> {known[0]}, rho=3 -> {known[1]:.7f}",
    )


def check_sine_square_integral() -> Check:
    worst = 0.0
    for delta in (0.5, 1.0, 3.0):
        for frac in (0.1, 0.5, 0.9):
            rho = frac * 2 / delta
            w = rho * np.sqrt(4 - delta**2 * rho**2) / 2
            T = 40 / (delta * rho**2)
            edges = np.linspace(0, T, int(np.ceil(T * w / np.pi)) + 2)
            num = sum(
                integrate.quad(lambda t: np.exp(-delta * rho**2 * t) * np.sin(w * t) ** 2, a, b, epsrel=1e-13)[0]
                for a, b in zip(edges[:-1], edges[1:])
            )
            worst = max(worst, _rel(num, strong_sine_square_integral(delta, rho)))
    return Check("damped sine-square integral (4-d^2 r^2)/(8 d r^2)", worst < 1e-8, f"max rel err {worst:.2e}")


def check_initial_conditions() -> Check:
    rho = np.array([0.1, 0.5, 1.0, 2.0, 3.0, 7.0])
    worst = 0.0
    for model in (DampingModel.strong(1.0), DampingModel.weak(1.0)):
        worst = max(worst, np.max(np.abs(multiplier(model, 0.0, rho))))
        worst = max(worst, np.max(np.abs(multiplier_dt(model, 0.0, rho) - 1)))
        # derivative against a central difference
        h = 1e-5
        fd = (multiplier(model, 1 + h, rho) - multiplier(model, 1 - h, rho)) / (2 * h)
        worst = max(worst, np.max(np.abs(fd - multiplier_dt(model, 1.0, rho))) / 1e3)
    return Check("m(0)=0, dm/dt(0)=1, dm/dt vs finite difference", worst < 1e-12, f"max deviation {worst:.1e}")


def check_branch_continuity() -> Check:
    ok = True
    detail = []
    for model in (DampingModel.strong(1.0), DampingModel.weak(1.0)):
        b = model.branch_point
        for t in (0.5, 1.0, 5.0):
            at = multiplier(model, t, b)
            limit = t * np.exp(-t * model.branch_rate())
            ok &= abs(at - limit) <= 1e-14 * limit
            devs = [max(abs(multiplier(model, t, b + s * eps) - at) for s in (-1, 1)) for eps in (1e-3, 1e-5, 1e-7)]
            # a Lipschitz function shrinks its deviation with eps
            ok &= devs[1] < 0.05 * devs[0] and devs[2] < 0.05 * devs[1]
            detail.append(f"{devs[-1]:.1e}")
    return Check("branch-point continuity", bool(ok), "deviation at eps=1e-7: " + ", ".join(detail))


def check_product_integral() -> Check:
    worst_sym = 0.0
    worst_num = 0.0
    for model in (DampingModel.strong(1.0), DampingModel.weak(1.0)):
        for s, rho in ((0.6, 1.0), (0.4, 3.0), (1.9, 2.2)):
            a = product_time_integral(model, s, rho)
            worst_sym = max(worst_sym, abs(a - product_time_integral(model, rho, s)))
            slow = min(float(decay_rates(model, s)[0]), float(decay_rates(model, rho)[0]))
            T = 30 / slow
            edges = np.linspace(0, T, int(T) + 2)
            num = sum(
                integrate.quad(lambda t: multiplier(model, t, s) * multiplier(model, t, rho), lo, hi, epsrel=1e-13)[0]
                for lo, hi in zip(edges[:-1], edges[1:])
            )
            worst_num = max(worst_num, _rel(num, a))
    diag = product_time_integral(DampingModel.strong(1.0), 1.0, 1.0)
    return Check(
        "int m(t,s) m(t,rho) dt",
        worst_sym == 0 and worst_num < 1e-8 and diag == 0.5,
        f"asymmetry {worst_sym:.1e}, max rel err vs quadrature {worst_num:.2e}, diag(1,1)={diag}",
    )


def check_gram_structure() -> Check:
    grid = radial_grid()
    details = []
    ok = True
    for model, alpha in ((DampingModel.strong(1.0), 1.5), (DampingModel.weak(1.0), 0.75)):
        G = assemble_gram_matrix(KernelSpec(model, ModeIndex(3, 0), alpha), grid)
        dec = eig_sym(G)
        lam1 = dec.eigenvalues[0]
        asym = float(np.max(np.abs(G.values - G.values.T)))
        resid = float(np.max(np.linalg.norm(G.values @ dec.eigenvectors - dec.eigenvectors * dec.eigenvalues, axis=0)))
        low = float(dec.eigenvalues[-1] / lam1)
        ok &= asym == 0 and resid <= 1e-10 * lam1 and low >= -1e-10
        details.append(f"{model.kind.value}: asym={asym:.0e} resid/l1={resid / lam1:.1e} min l/l1={low:.1e}")
    return Check("Gram matrix symmetric, PSD, eigen residuals", bool(ok), "; ".join(details))


CHECKS = (
    check_harmonic_dim,
    check_time_l2_closed_form,
    check_sine_square_integral,
    check_initial_conditions,
    check_branch_continuity,
    check_product_integral,
    check_gram_structure,
)


def run_checks() -> list[Check]:
    return [fn() for fn in CHECKS]
