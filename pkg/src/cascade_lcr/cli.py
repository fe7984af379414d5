"""Command-line front end.

    cascade-lcr curve    --scenario FILE [--method M] [--grid lo:hi:step] [--seed S] [--out DIR]
    cascade-lcr figure   ID [--out DIR] [--seed S] [--grid ...] [--fm HZ] [--duration SEC]
    cascade-lcr cdf      --scenario FILE [--grid ...] [--out DIR]
    cascade-lcr simulate --scenario FILE [--seed S] [--duration SEC] [--out DIR]
    cascade-lcr selftest

Without ``--out`` the ``curve`` and ``cdf`` tables go to stdout.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__, analytic, exact, simulator, specialfn
from .core import CascadeSpec, ChannelError
from .csvio import CURVE_HEADER, curve_rows, fmt, render, write_atomic
from .scenario import (
    DEFAULT_GRID, FIGURES, ScenarioError, compute_curves, figure_curves,
    load_scenario, parse_grid,
)

FIGURE_HEADERS = {
    "lcr": ("threshold_db", "threshold_lin", "lcr_normalized", "method", "lcr_se"),
    "afd": ("threshold_db", "threshold_lin", "afd_normalized", "method", "afd_se"),
}


def cmd_curve(scenario, method: str = "all", grid=None, seed=None) -> str:
    """CSV text with one row per (threshold, method)."""
    curves = compute_curves(scenario, method, grid, seed)
    db = scenario.threshold_grid(grid).db
    rows = []
    for c in curves:
        rows.extend(curve_rows(c, db, scenario.fm_ref))
    return render(CURVE_HEADER, rows)


def figure_tables(fig_id: int, seed: int = 0, grid=DEFAULT_GRID, fm: float = 1.0,
                  duration=None) -> dict:
    """CSV text per tap ``N``, restricted to the figure's LCR or AFD columns."""
    if fig_id not in FIGURES:
        raise ScenarioError(f"unknown figure {fig_id}; expected one of {sorted(FIGURES)}")
    quantity, _ = FIGURES[fig_id]
    header = FIGURE_HEADERS[quantity]
    keep = [CURVE_HEADER.index(h) for h in header]
    out = {}
    for n, (sc, curves) in figure_curves(fig_id, fm=fm, grid=grid, duration=duration,
                                         seed=seed).items():
        db = sc.threshold_grid().db
        rows = [tuple(r[i] for i in keep) for c in curves for r in curve_rows(c, db, sc.fm_ref)]
        out[n] = render(header, rows)
    return out


def cmd_figure(fig_id: int, out_dir, seed: int = 0, grid=DEFAULT_GRID, fm: float = 1.0,
               duration=None) -> list:
    """Write ``fig<ID>_N<n>.csv`` for the taps N = 2, 3, 5; returns the paths."""
    tables = figure_tables(fig_id, seed, grid, fm, duration)
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for n, text in tables.items():
        path = os.path.join(out_dir, f"fig{fig_id}_N{n}.csv")
        write_atomic(path, text)
        paths.append(path)
    return paths


def cmd_cdf(scenario, grid=None) -> str:
    cascade = scenario.cascade()
    tg = scenario.threshold_grid(grid)
    cdf = np.atleast_1d(specialfn.cdf_product_rayleigh(tg.values, cascade))
    rows = ((fmt(d), fmt(y), fmt(c)) for d, y, c in zip(tg.db, tg.values, cdf))
    return render(("threshold_db", "threshold_lin", "cdf"), rows)


def cmd_simulate(scenario, seed=None, duration=None):
    t = scenario.trace_spec(seed)
    if duration is not None:
        t = simulator.TraceSpec(duration=duration, seed=t.seed, oscillators=t.oscillators)
    return simulator.cascade_trace(scenario.cascade(), t)


# --------------------------------------------------------------------------
# selftest
# --------------------------------------------------------------------------


def _selftest_checks():
    """(name, passed, detail) for quick oracle checks."""
    checks = []

    def check(name, value, ref, tol):
        rel = abs(value - ref) / abs(ref)
        checks.append((name, rel <= tol, f"got {value:.12g}, want {ref:.12g}, rel {rel:.2e}"))

    # E1(1) from the exponential integral tables
    check("E1(1)", specialfn.gamma_upper_zero(1.0), 0.21938393439552029, 1e-12)
    z = 0.7
    check("CDF n=2 vs Bessel form", specialfn.product_exp_cdf(z, 2),
          specialfn.dual_product_exp_cdf_closed(z), 1e-9)
    check("CDF n=1", specialfn.product_exp_cdf(z, 1), -math.expm1(-z), 1e-12)
    one = CascadeSpec.simple([1.0], [1.0])
    check("Laplace N=1 reduces to Rayleigh", float(analytic.laplace_lcr(one, 1.0)),
          analytic.rayleigh_lcr(1.0, 1.0, 1.0), 1e-12)
    two = CascadeSpec.simple([1.0, 2.0], [1.0, 0.5])
    check("exact 2-D grid vs dual-hop quadrature", exact.exact_lcr(two, 0.3),
          exact.exact_lcr_dualhop(two, 0.3), 1e-6)
    t = simulator.TraceSpec(duration=100.0, seed=3)
    a = simulator.gen_f2m_trace(1.0, 1.0, t).samples
    b = simulator.gen_f2m_trace(1.0, 1.0, t).samples
    checks.append(("simulator determinism", bool(np.array_equal(a, b)), f"{len(a)} samples"))
    return checks


def cmd_selftest(stream=sys.stdout) -> bool:
    ok = True
    for name, passed, detail in _selftest_checks():
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}", file=stream)
    return ok


# --------------------------------------------------------------------------
# argparse
# --------------------------------------------------------------------------


def _grid_arg(text):
    try:
        return parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cascade-lcr", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scenario=True, grid=True, seed=True):
        if scenario:
            sp.add_argument("--scenario", required=True, help="scenario file (key = value)")
        if grid:
            sp.add_argument("--grid", type=_grid_arg, default=None, metavar="LO:HI:STEP",
                            help="threshold grid in dB")
        if seed:
            sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None, metavar="DIR", help="output directory")

    sp = sub.add_parser("curve", help="LCR/AFD curves for a scenario")
    common(sp)
    sp.add_argument("--method", choices=("exact", "laplace", "simulate", "all"), default="all")

    sp = sub.add_parser("figure", help="reproduce a published figure scenario")
    sp.add_argument("figure_id", type=int, choices=sorted(FIGURES))
    common(sp, scenario=False)
    sp.add_argument("--fm", type=float, default=1.0, help="mobile node Doppler, Hz")
    sp.add_argument("--duration", type=float, default=None, help="simulated seconds per tap")

    sp = sub.add_parser("cdf", help="cascade amplitude CDF on the grid")
    common(sp, seed=False)

    sp = sub.add_parser("simulate", help="export a simulated cascade trace")
    common(sp, grid=False)
    sp.add_argument("--duration", type=float, default=None)

    sub.add_parser("selftest", help="quick oracle checks")
    return p


def _emit(text, out, name):
    if out is None:
        sys.stdout.write(text)
        return
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, name)
    write_atomic(path, text)
    print(path, file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            return 0 if cmd_selftest() else 1
        if args.command == "figure":
            paths = cmd_figure(args.figure_id, args.out or ".", seed=args.seed or 0,
                               grid=args.grid or DEFAULT_GRID, fm=args.fm, duration=args.duration)
            for path in paths:
                print(path, file=sys.stderr)
            return 0
        scenario = load_scenario(args.scenario)
        if args.command == "curve":
            _emit(cmd_curve(scenario, args.method, args.grid, args.seed), args.out, "curve.csv")
        elif args.command == "cdf":
            _emit(cmd_cdf(scenario, args.grid), args.out, "cdf.csv")
        elif args.command == "simulate":
            trace = cmd_simulate(scenario, args.seed, args.duration)
            out = args.out or "."
            os.makedirs(out, exist_ok=True)
            path = os.path.join(out, "trace.csv")
            simulator.write_trace_csv(trace, path)
            print(f"{path}: {len(trace.samples)} samples at {trace.sample_rate:g} Hz, "
                  f"mean power {trace.mean_power():.6g}", file=sys.stderr)
    except (ScenarioError, ChannelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
