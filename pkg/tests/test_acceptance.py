"""Acceptance gate: one PASS/FAIL line per criterion, at the stated tolerance and time budget."""

import math
import time

import numpy as np

from cascade_lcr import analytic, exact, simulator
from cascade_lcr.core import CascadeSpec, ThresholdGrid
from cascade_lcr.scenario import (
    FIGURE_TAPS, figure_scenario, laplace_curve, simulated_curve,
)
from cascade_lcr.specialfn import (
    cdf_product_rayleigh, dual_product_exp_cdf_closed, product_exp_cdf,
)


def rel_err(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return np.abs(a - b) / np.abs(b)


def test_c01_single_hop_reduction(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(50):
        omega, f, y = rng.uniform(0.05, 20), rng.uniform(0.1, 200), rng.uniform(0.01, 5)
        c = CascadeSpec.simple([omega], f)
        worst = max(worst, float(rel_err(analytic.laplace_lcr(c, y), analytic.rayleigh_lcr(omega, f, y))))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and dt < 1
    assert report("C1 N=1 reduction", ok, f"max rel err {worst:.2e} (tol 1e-12), {dt:.3f}s (< 1s)")


def test_c02_hessian_apparatus(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    eig_worst = det_worst = 0.0
    for n in range(2, 7):
        for _ in range(20):
            h = analytic.lcr_hessian(CascadeSpec.simple(rng.uniform(0.2, 5.0, n)))
            num_eig = np.linalg.eigvalsh(h.matrix)
            eig_worst = max(eig_worst, float(np.max(rel_err(np.sort(h.eigenvalues), num_eig))))
            det_worst = max(det_worst, float(rel_err(h.determinant, np.linalg.det(h.matrix))))
    dt = time.perf_counter() - t0
    report("C2a closed-form eigenvalues", eig_worst <= 1e-9,
           f"max rel err {eig_worst:.2e} (tol 1e-9), random powers N=2..6")
    report("C2b closed-form determinant", det_worst <= 1e-9,
           f"max rel err {det_worst:.2e} (tol 1e-9)")
    ok = eig_worst <= 1e-9 and det_worst <= 1e-9 and dt < 1
    assert report("C2 Hessian apparatus", ok, f"eig {eig_worst:.2e}, det {det_worst:.2e}, {dt:.3f}s")


def test_c03_critical_point(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    worst = 0.0
    for n in range(2, 7):
        c = CascadeSpec.simple(rng.uniform(0.2, 5.0, n))
        y = rng.uniform(0.05, 3.0)
        h = analytic.lcr_exponent(c, y)
        x = analytic.lcr_critical_point(c, y)
        g0 = np.linalg.norm(analytic.fd_gradient(h, x))
        g_ref = np.linalg.norm(analytic.fd_gradient(h, 2.0 * x))
        worst = max(worst, g0 / g_ref)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and dt < 1
    assert report("C3 critical point", ok, f"max |grad|/|grad_ref| {worst:.2e} (tol 1e-6), {dt:.3f}s")


def test_c04_cdf_oracles(report):
    t0 = time.perf_counter()
    zs = np.geomspace(1e-4, 10, 60)
    e1 = max(float(rel_err(product_exp_cdf(z, 1), -math.expm1(-z))) for z in zs)
    e2 = max(float(rel_err(product_exp_cdf(z, 2), dual_product_exp_cdf_closed(z))) for z in zs)
    rng = np.random.default_rng(4)
    worst_sigma = 0.0
    for n in (3, 5):
        prod = np.prod(rng.exponential(size=(n, 1_000_000)), axis=0)
        for q in np.linspace(0.1, 0.9, 9):
            z = float(np.quantile(prod, q))
            p = product_exp_cdf(z, n)
            se = math.sqrt(p * (1 - p) / prod.size)
            worst_sigma = max(worst_sigma, abs(np.mean(prod <= z) - p) / se)
    dt = time.perf_counter() - t0
    ok = e1 <= 1e-8 and e2 <= 1e-8 and worst_sigma <= 3 and dt < 30
    assert report("C4 CDF oracles", ok,
                  f"n=1 {e1:.2e}, n=2 {e2:.2e} (tol 1e-8); empirical n=3,5 max {worst_sigma:.2f} SE "
                  f"(tol 3); {dt:.1f}s (< 30s)")


def test_c05_dual_hop_consistency(report):
    t0 = time.perf_counter()
    c = CascadeSpec.simple([1.0, 1.0], 1.0)
    ys = np.sqrt(np.sqrt(c.phi)) * 10 ** (np.linspace(-25, 5, 30) / 20)
    worst = max(float(rel_err(exact.exact_lcr(c, y), exact.exact_lcr_dualhop(c, y))) for y in ys)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and dt < 30
    assert report("C5 N=2 grid vs single integral", ok,
                  f"max rel err {worst:.2e} on 30 thresholds (tol 1e-6), {dt:.2f}s (< 30s)")


def test_c06_approximation_tightness(report):
    t0 = time.perf_counter()
    details = []
    ok = True
    grid = ThresholdGrid.from_db(-30, 10, 0.5)
    for n in (2, 3):
        c = CascadeSpec.simple([1.0] * n, 1.0)
        ex = exact.exact_lcr_curve(c, grid.values)
        lap = analytic.laplace_lcr(c, grid.values)
        below = grid.db <= grid.db[np.argmax(ex)] + 1e-9
        dev = rel_err(lap[below], ex[below])
        i = int(np.argmax(dev))
        details.append(f"N={n} max {dev[i]:.1%} at {grid.db[below][i]:.1f} dB")
        ok &= bool(dev.max() <= 0.10)
    dt = time.perf_counter() - t0
    ok &= dt < 120
    assert report("C6 exact vs Laplace <= 10% at/below peak", ok, ", ".join(details) + f"; {dt:.1f}s")


def test_c07_simulator_calibration(report):
    t0 = time.perf_counter()
    grid = ThresholdGrid.from_db(-20, 3, 23 / 9)
    # 20000 expected fades per generator (>= 2000), seed 0
    f2m = simulator.gen_f2m_trace(1.0, 10.0, simulator.TraceSpec(duration=2000.0, seed=0))
    m2m = simulator.gen_m2m_trace(1.0, 3.0, 4.0, simulator.TraceSpec(duration=4000.0, seed=0))
    e_f = rel_err(simulator.estimate_lcr_afd(f2m, grid).lcr, analytic.rayleigh_lcr(1.0, 10.0, grid.values))
    e_m = rel_err(simulator.estimate_lcr_afd(m2m, grid).lcr, analytic.rayleigh_lcr(1.0, 5.0, grid.values))
    dt = time.perf_counter() - t0
    ok = e_f.max() <= 0.05 and e_m.max() <= 0.05 and dt < 120
    assert report("C7 simulator calibration", ok,
                  f"f2m max {e_f.max():.2%}, m2m max {e_m.max():.2%} (tol 5%), {dt:.1f}s (< 2 min)")


def _unimodal(v):
    k = int(np.argmax(v))
    return bool(np.all(np.diff(v[: k + 1]) > 0) and np.all(np.diff(v[k:]) < 0))


def test_c08_figure_scenarios(report):
    t0 = time.perf_counter()
    ok = True
    for snr, figs in ((5.0, "2/3"), (20.0, "4/5")):
        fig = 2 if snr == 5.0 else 4
        lap, sim, peaks = {}, {}, {}
        for n in FIGURE_TAPS:
            sc = figure_scenario(fig, n, seed=0)
            c, grid = sc.cascade(), sc.threshold_grid()
            lap[n] = laplace_curve(c, grid)
            sim[n] = simulated_curve(c, grid, sc.trace_spec())
            peaks[n] = grid.db[np.argmax(lap[n].lcr)]
        db = grid.db
        parts = []
        group_ok = True
        for n in FIGURE_TAPS:
            m = (db >= -25 - 1e-9) & (db <= peaks[n] + 1e-9)
            el = rel_err(sim[n].lcr[m], lap[n].lcr[m]).max()
            ea = rel_err(sim[n].afd[m], lap[n].afd[m]).max()
            sim_afd = sim[n].afd[np.isfinite(sim[n].afd)]
            shape = (bool(np.all(np.diff(lap[n].afd) > 0)) and _unimodal(lap[n].lcr)
                     and bool(np.all(np.diff(sim_afd) > 0)))
            group_ok &= bool(el <= 0.10 and ea <= 0.10 and shape)
            parts.append(f"N={n} LCR {el:.1%} AFD {ea:.1%} shape {'ok' if shape else 'bad'}")
        below = db <= min(peaks.values()) + 1e-9
        order_ok = True
        for curves in (lap, sim):
            for a, b in zip(FIGURE_TAPS, FIGURE_TAPS[1:]):
                la, lb = curves[a].lcr[below], curves[b].lcr[below]
                aa, ab = curves[a].afd[below], curves[b].afd[below]
                fin = np.isfinite(aa) & np.isfinite(ab)
                order_ok &= bool(np.all(lb > la) and np.all(ab[fin] < aa[fin]))
        group_ok &= order_ok
        ok &= group_ok
        report(f"C8 figs {figs} ({snr:g} dB)", group_ok,
               "; ".join(parts) + f"; monotone in N below peak: {'yes' if order_ok else 'no'}")
    dt = time.perf_counter() - t0
    ok &= dt < 600
    assert report("C8 figure-scenario reproduction", ok, f"sim vs Laplace tol 10%, {dt:.1f}s (< 10 min)")


def test_c08_supplement_simulation_vs_exact(report):
    """Not a criterion: the same taps against the exact integral (N = 2, 3)."""
    parts = []
    ok = True
    for fig in (2, 4):
        for n in (2, 3):
            sc = figure_scenario(fig, n, seed=0)
            c = sc.cascade()
            grid = ThresholdGrid.from_db(-25, 10, 2.5, sc.omega_hat[0])
            ex = exact.exact_lcr_curve(c, grid.values)
            sim = simulated_curve(c, grid, sc.trace_spec())
            m = grid.db <= grid.db[np.argmax(ex)] + 1e-9
            e = rel_err(sim.lcr[m], ex[m]).max()
            ok &= bool(e <= 0.10)
            parts.append(f"fig{fig} N={n} {e:.1%}")
    assert report("C8+ (info) simulated vs exact LCR <= 10%", ok, ", ".join(parts))


def test_c09_identity_suite(report):
    t0 = time.perf_counter()
    grid = ThresholdGrid.from_db(-30, 10, 2.0)
    ys = grid.values
    worst = 0.0
    for n in (1, 2, 3, 5):
        c = CascadeSpec.simple(np.linspace(0.5, 2.0, n), np.linspace(1.0, 2.0, n))
        cdf = cdf_product_rayleigh(ys, c)
        worst = max(worst, float(np.max(rel_err(analytic.laplace_afd(c, ys) * analytic.laplace_lcr(c, ys), cdf))))
        if 2 <= n <= 3:
            lcr = exact.exact_lcr_curve(c, ys)
            afd = np.array([exact.exact_afd(c, y) for y in ys])
            worst = max(worst, float(np.max(rel_err(afd * lcr, cdf))))
    c = CascadeSpec.simple([1.0, 1.0, 1.0], 1.0)
    tr = simulator.cascade_trace(c, simulator.TraceSpec(duration=500.0, seed=0))
    est = simulator.estimate_lcr_afd(tr, ys)
    fin = ~est.undefined
    emp = np.array([np.mean(tr.samples < y) for y in ys])
    sim_ok = bool(np.allclose(est.afd[fin] * est.lcr[fin], est.cdf[fin], rtol=1e-12)
                  and np.allclose(est.cdf, emp, rtol=1e-12, atol=0))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and sim_ok and dt < 60
    assert report("C9 afd*lcr = CDF", ok,
                  f"analytic/exact max rel err {worst:.2e} (tol 1e-12), simulated equals empirical CDF: "
                  f"{'yes' if sim_ok else 'no'}; {dt:.1f}s")


def test_c10_generic_laplace_engine(report):
    t0 = time.perf_counter()
    worst = 0.0
    for omegas, y in (([1.0, 1.0], 1.0), ([0.5, 2.0], 0.3), ([1.0, 1.0, 1.0], 0.7), ([0.4, 1.5, 2.5], 1.2)):
        c = CascadeSpec.simple(omegas, np.linspace(1.0, 2.0, len(omegas)))
        prob, pre = analytic.lcr_laplace_problem(c, y)
        r = analytic.generic_laplace_approx(prob, np.ones(len(omegas) - 1))
        worst = max(worst, float(rel_err(pre * r.approx_value, analytic.laplace_lcr(c, y))))
    g1 = analytic.generic_laplace_approx(
        analytic.LaplaceProblem(1, lambda x: 1.0, lambda x: float(x[0] ** 2), 1.0, "real"), [0.4])
    g2 = analytic.generic_laplace_approx(
        analytic.LaplaceProblem(2, lambda x: 1.0, lambda x: float(x @ x), 4.0, "real"), [0.3, -0.2])
    eg = max(float(rel_err(g1.approx_value, math.sqrt(math.pi))), float(rel_err(g2.approx_value, math.pi / 4)))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-4 and eg <= 1e-10 and dt < 60
    assert report("C10 generic Laplace engine", ok,
                  f"LCR cases max rel err {worst:.2e} (tol 1e-4), Gaussian {eg:.2e} (tol 1e-10), {dt:.2f}s")
