"""
Acceptance suite: one test per criterion, each printing a single
"[ACCEPT n] PASS|FAIL ..." line (collected again in the terminal summary).
"""

import time

import numpy as np
import pytest

from dampinv.forward import ModeSeries, ReducedCoefficient, analyze_sphere, forward_mode, sphere_layout, synthesize_sphere
from dampinv.grids import adaptive_time_grid, radial_grid
from dampinv.io import load_matrix, read_json, save_matrix, write_json
from dampinv.kernel import KernelSpec, assemble_gram_matrix, gram_H, kernel_l2_norm
from dampinv.model import DampingModel, multiplier, multiplier_time_l2
from dampinv.pipeline import RunConfig, run_pipeline
from dampinv.reconstruct import data_to_g
from dampinv.spectral import eig_sym
from dampinv.specfun import ModeIndex, bessel_j, modes_up_to
from dampinv.validate import numeric_time_l2
from oracles import numeric_gram, smooth_phantom

DEFAULT_SPECS = {
    "strong": KernelSpec(DampingModel.strong(1.0), ModeIndex(3, 0), 1.5),
    "weak": KernelSpec(DampingModel.weak(1.0), ModeIndex(3, 0), 0.75),
}


def _rho_cases(model):
    b = model.branch_point
    return [0.3, 1.0, b - 1e-3, b + 1e-3, 5.0]


def _time_l2_criterion(make, closed_form):
    start = time.perf_counter()
    worst = 0.0
    count = 0
    for p in (0.5, 1.0, 3.0):
        model = make(p)
        for rho in _rho_cases(model):
            exact = closed_form(p, rho)
            worst = max(worst, abs(numeric_time_l2(model, rho) - exact) / exact)
            worst = max(worst, abs(multiplier_time_l2(model, rho) - exact) / exact)
            count += 1
    return worst, count, time.perf_counter() - start


def test_criterion_1_strong_time_integral(acceptance):
    worst, count, elapsed = _time_l2_criterion(DampingModel.strong, lambda d, r: 1 / (2 * d * r**4))
    acceptance(1, worst <= 1e-6 and elapsed < 5,
               f"strong int m^2 dt vs 1/(2 delta rho^4): max rel err {worst:.2e} over {count} cases (tol 1e-6), {elapsed:.2f}s (limit 5s)")


def test_criterion_2_weak_time_integral(acceptance):
    worst, count, elapsed = _time_l2_criterion(DampingModel.weak, lambda g, r: 1 / (2 * g * r**2))
    acceptance(2, worst <= 1e-6 and elapsed < 5,
               f"weak int m^2 dt vs 1/(2 gamma rho^2): max rel err {worst:.2e} over {count} cases (tol 1e-6), {elapsed:.2f}s (limit 5s)")


def test_criterion_3_branch_point_continuity(acceptance):
    worst = 0.0
    where = ""
    for model in (DampingModel.strong(1.0), DampingModel.weak(1.0)):
        b = model.branch_point
        for t in (0.5, 1.0, 5.0):
            limit = t * np.exp(-t * model.branch_rate())
            for rho in (b - 1e-5, b + 1e-5):
                m = multiplier(model, t, rho)
                dev = abs(m - limit) / abs(m)
                if dev > worst:
                    worst, where = dev, f"{model.kind.value} t={t} rho=b*{rho - b:+.0e}"
    acceptance(3, worst <= 1e-6,
               f"|m(t, b*+-1e-5) - t exp(-t rate)| / |m|: max {worst:.2e} at {where} (tol 1e-6)")


def test_criterion_4_gram_kernel(acceptance):
    rng = np.random.default_rng(20240611)
    worst = 0.0
    worst_diag = 0.0
    for spec in DEFAULT_SPECS.values():
        for s, rho in rng.uniform(0.05, 12.0, size=(100, 2)):
            ref = numeric_gram(spec, s, rho)
            worst = max(worst, abs(gram_H(spec, s, rho) - ref) / abs(ref))
        for rho in rng.uniform(0.05, 12.0, size=100):
            diag = rho ** (2 * spec.alpha) * bessel_j(spec.nu, rho) ** 2 * multiplier_time_l2(spec.model, rho)
            worst_diag = max(worst_diag, abs(gram_H(spec, rho, rho) - diag) / diag)
    acceptance(4, worst <= 1e-8 and worst_diag <= 1e-12,
               f"gram_H vs time quadrature: max rel err {worst:.2e} (tol 1e-8) on 2x100 pairs; diagonal identity {worst_diag:.1e} (tol 1e-12)")


def test_criterion_5_spectral_structure(acceptance):
    start = time.perf_counter()
    grid = radial_grid()
    parts = []
    ok = len(grid) == 256
    for name, spec in DEFAULT_SPECS.items():
        G = assemble_gram_matrix(spec, grid)
        dec = eig_sym(G)
        lam1 = dec.eigenvalues[0]
        asym = float(np.max(np.abs(G.values - G.values.T)))
        resid = float(np.max(np.linalg.norm(G.values @ dec.eigenvectors - dec.eigenvectors * dec.eigenvalues, axis=0)))
        low = float(dec.eigenvalues[-1])
        ok &= asym == 0 and resid <= 1e-10 * lam1 and low >= -1e-10 * lam1
        parts.append(f"{name}: asym={asym:.0e} resid/l1={resid / lam1:.1e} min(l)/l1={low / lam1:.1e}")
    elapsed = time.perf_counter() - start
    acceptance(5, bool(ok) and elapsed < 30, "256-node Gram: " + "; ".join(parts) + f"; {elapsed:.2f}s (limit 30s)")


def _converged_norm(spec, R0=20.0, cap=163840.0):
    # doubles R until the value changes by less than 1%; also returns the increments
    R = R0
    prev = kernel_l2_norm(spec, R)
    increments = []
    while R < cap:
        cur = prev + kernel_l2_norm(spec, 2 * R, rho_min=R)
        increments.append(cur - prev)
        R *= 2
        if abs(cur - prev) < 0.01 * abs(prev):
            return True, R, cur, increments
        prev = cur
    return False, R, prev, increments


def test_criterion_6_alpha_window(acceptance):
    ok = True
    slowest = (0.0, "")
    for make, name in ((DampingModel.strong, "strong"), (DampingModel.weak, "weak")):
        for n in (2, 3):
            model = make(1.0)
            lo, hi = model.admissible_alpha(n)
            alpha = (lo + hi) / 2
            for l in (0, 1, 4):
                conv, R, _, inc = _converged_norm(KernelSpec(model, ModeIndex(n, l), alpha))
                # convergence must be genuine: successive increments shrink
                ok &= conv and all(b < a for a, b in zip(inc, inc[1:]))
                if R > slowest[0]:
                    slowest = (R, f"{name} n={n} l={l} alpha={alpha}")
    growth = []
    for model, alpha in ((DampingModel.strong(1.0), 2.5), (DampingModel.weak(1.0), 1.25)):
        spec = KernelSpec(model, ModeIndex(3, 0), alpha)
        inc = [kernel_l2_norm(spec, 2 * R, rho_min=R) for R in (20.0, 40.0, 80.0, 160.0)]
        ok &= all(b >= a for a, b in zip(inc, inc[1:]))
        growth.append(f"{model.kind.value} alpha={alpha}: " + ", ".join(f"{x:.3g}" for x in inc))
    acceptance(6, bool(ok),
               f"midpoint norms converge (<1% per doubling; slowest {slowest[1]} at R={slowest[0]:g}); "
               f"non-decaying increments over [R,2R], R=20..160: " + "; ".join(growth))


def test_criterion_7_fredholm_consistency(acceptance):
    start = time.perf_counter()
    grid = radial_grid()
    rng = np.random.default_rng(7)
    worst = 0.0
    for spec in DEFAULT_SPECS.values():
        G = assemble_gram_matrix(spec, grid)
        tgrid = adaptive_time_grid(spec.model, grid)
        for _ in range(5):
            c = ReducedCoefficient(spec.mode, spec.alpha, smooth_phantom(rng, grid.nodes), grid)
            g = data_to_g(spec, forward_mode(spec.model, c, tgrid), grid)
            Bc = G.apply(c.values)
            worst = max(worst, np.linalg.norm(g - Bc) / np.linalg.norm(Bc))
    elapsed = time.perf_counter() - start
    acceptance(7, worst <= 1e-6 and elapsed < 60,
               f"||data_to_g(forward(c)) - Bc|| / ||Bc||: max {worst:.2e} over 2x5 phantoms (tol 1e-6), {elapsed:.1f}s (limit 60s)")


def test_criterion_8_end_to_end(acceptance, tmp_path):
    start = time.perf_counter()
    ok = True
    parts = []
    for model in ("strong", "weak"):
        out = tmp_path / model
        reports, _ = run_pipeline(RunConfig(model=model, n=3, lmax=2, reg_param=1e-8), out)
        errs = [r.rel_l2_error for r in reports]
        ok &= len(reports) == 9 and max(errs) <= 0.05
        noisy = {}
        for tau in (1e-8, 1e-14):
            cfg = RunConfig(model=model, n=3, lmax=2, reg_param=tau, noise_sigma=0.01, noise_relative=True, seed=1)
            noisy[tau] = [r.rel_l2_error for r in run_pipeline(cfg, tmp_path / f"{model}_noisy")[0]]
        ordered = all(a < b for a, b in zip(noisy[1e-8], noisy[1e-14]))
        ok &= ordered
        parts.append(
            f"{model}: max err {max(errs):.2e} (tol 5e-2); 1% noise tau=1e-8 vs 1e-14 "
            f"min ratio {min(b / a for a, b in zip(noisy[1e-8], noisy[1e-14])):.3g} ({'ordered' if ordered else 'NOT ordered'})"
        )
    elapsed = time.perf_counter() - start
    acceptance(8, bool(ok) and elapsed < 120, "; ".join(parts) + f"; {elapsed:.1f}s (limit 120s)")


def test_criterion_9_sphere_round_trip(acceptance):
    from dampinv.grids import uniform_time_grid

    rng = np.random.default_rng(9)
    tgrid = uniform_time_grid(1.0, 4, 8)
    worst = 0.0
    for n in (2, 3):
        for l_max in range(5):
            modes = [ModeSeries(m, rng.normal(size=len(tgrid)), tgrid) for m in modes_up_to(n, l_max)]
            layout = sphere_layout(n, l_max)
            back = analyze_sphere(synthesize_sphere(modes, layout.directions), layout, l_max, tgrid)
            worst = max(worst, max(np.max(np.abs(a.values - b.values)) for a, b in zip(modes, back)))
    acceptance(9, worst <= 1e-8, f"synthesize->analyze, n in {{2,3}}, l <= 4: max coefficient error {worst:.1e} (tol 1e-8)")


def test_criterion_10_persistence(acceptance, tmp_path):
    rng = np.random.default_rng(10)
    exact = True
    samples = [
        rng.normal(size=(7, 5)),
        rng.normal(size=(3, 3)) * 10.0 ** rng.integers(-300, 300, size=(3, 3)),
        np.array([[0.1, 1 / 3, -0.0, 5e-324, 1.7976931348623157e308]]),
    ]
    for i, a in enumerate(samples):
        back = load_matrix(save_matrix(tmp_path / f"m{i}.csv", a))
        exact &= back.tobytes() == a.tobytes()
    data = {"x": 0.1 + 0.2, "y": [1e-300, -2.5], "z": "s"}
    exact &= read_json(write_json(tmp_path / "d.json", data)) == data

    def run_files(name):
        cfg = RunConfig(model="weak", lmax=1, panels=8, order=8, seed=7, noise_sigma=1e-3)
        run_pipeline(cfg, tmp_path / name)
        return {p.name: p.read_bytes() for p in sorted((tmp_path / name).iterdir()) if p.name != "manifest.json"}

    first, second = run_files("a"), run_files("b")
    identical = first == second
    ma, mb = read_json(tmp_path / "a" / "manifest.json"), read_json(tmp_path / "b" / "manifest.json")
    ma.pop("created"), mb.pop("created")
    identical &= ma == mb
    acceptance(10, bool(exact and identical),
               f"save/load value-exact: {bool(exact)}; seeded runs byte-identical over {len(first)} files "
               f"(manifest equal modulo timestamp): {bool(identical)}")
