"""Scenario files, published figure scenarios and curve computation.

Scenario file grammar: one ``key = value`` per line, ``#`` starts a comment,
array values are comma separated.  Keys:

=============  ==========================================================
hops           number of hops N (required)
omega_hat      mean hop powers; one value (broadcast) or N values
snr_db         per-hop mean SNR in dB; one value or N values.  Relays are
               semi-blind unless ``gain`` or ``gain_c`` is given
gain           explicit amplitude gains, N values, first must be 1
gain_c         fixed-gain constants C_i for the N-1 relays (needs snr_db)
fm             maximum Doppler of every mobile node, Hz
node_mobile    N+1 flags (1/0, yes/no, mobile/fixed); default all mobile
node_doppler   N+1 explicit node Doppler shifts, Hz (instead of fm)
fm_ref         Doppler used to normalise LCR/AFD; default max node shift
grid           lo_db:hi_db:step_db, dB relative to omega_hat of hop 1
methods        any of exact, laplace, simulate
duration       simulated seconds; default 4000 / fm_ref
seed           integer seed for the simulator
oscillators    sinusoids per quadrature branch
=============  ==========================================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import analytic, exact, simulator
from .core import (
    CascadeSpec, ChannelError, Explicit, FixedC, SecondOrderCurve, SemiBlind,
    ThresholdGrid, Unity,
)
from .specialfn import cdf_product_rayleigh

DEFAULT_GRID = (-30.0, 10.0, 0.5)
METHODS = ("exact", "laplace", "simulate")
FIGURE_TAPS = (2, 3, 5)
DEFAULT_FADE_CYCLES = 4000.0


class ScenarioError(ValueError):
    pass


@dataclass
class ScenarioFile:
    hops: int
    omega_hat: list
    node_doppler: list
    snr_db: Optional[list] = None
    gain: Optional[list] = None
    gain_c: Optional[list] = None
    fm_ref: Optional[float] = None
    grid: tuple = DEFAULT_GRID
    methods: list = field(default_factory=lambda: ["laplace"])
    duration: Optional[float] = None
    seed: int = 0
    oscillators: int = 32

    def __post_init__(self):
        n = self.hops
        if n < 1:
            raise ScenarioError("hops must be >= 1")
        for name, expected in (("omega_hat", n), ("node_doppler", n + 1), ("snr_db", n),
                               ("gain", n), ("gain_c", n - 1)):
            v = getattr(self, name)
            if v is not None and len(v) != expected:
                raise ScenarioError(f"{name} needs {expected} values for {n} hops, got {len(v)}")
        if self.gain is not None and self.gain_c is not None:
            raise ScenarioError("give gain or gain_c, not both")
        if self.gain_c is not None and self.snr_db is None:
            raise ScenarioError("gain_c needs snr_db to know the relay noise variances")
        for m in self.methods:
            if m not in METHODS:
                raise ScenarioError(f"unknown method {m!r}; expected one of {METHODS}")
        if self.fm_ref is None:
            self.fm_ref = max(self.node_doppler)
        if not self.fm_ref > 0:
            raise ScenarioError("fm_ref must be > 0 (no mobile node?)")
        if self.duration is None:
            self.duration = DEFAULT_FADE_CYCLES / self.fm_ref

    def cascade(self) -> CascadeSpec:
        n = self.hops
        if self.gain is not None:
            if not math.isclose(self.gain[0], 1.0):
                raise ScenarioError("the first gain belongs to the source and must be 1")
            gains = [Unity()] + [Explicit(g) for g in self.gain[1:]]
        elif self.gain_c is not None:
            gains = [Unity()] + [FixedC(c) for c in self.gain_c]
        elif self.snr_db is not None:
            gains = [Unity()] + [SemiBlind()] * (n - 1)
        else:
            gains = [Unity()] * n
        try:
            return CascadeSpec.from_nodes(self.omega_hat, self.node_doppler, gains, self.snr_db)
        except ChannelError as exc:
            raise ScenarioError(str(exc)) from exc

    def threshold_grid(self, grid: Optional[Sequence[float]] = None) -> ThresholdGrid:
        lo, hi, step = grid if grid is not None else self.grid
        return ThresholdGrid.from_db(lo, hi, step, reference_power=self.omega_hat[0])

    def trace_spec(self, seed: Optional[int] = None) -> simulator.TraceSpec:
        return simulator.TraceSpec(duration=self.duration, seed=self.seed if seed is None else seed,
                                   oscillators=self.oscillators)


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------


def parse_grid(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be lo_db:hi_db:step_db, got {text!r}")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ValueError("grid needs lo <= hi and step > 0")
    return lo, hi, step


def _floats(text: str) -> list:
    return [float(v) for v in text.split(",") if v.strip()]


_FLAGS = {"1": True, "yes": True, "true": True, "mobile": True,
          "0": False, "no": False, "false": False, "fixed": False}


def _flags(text: str) -> list:
    out = []
    for v in text.split(","):
        v = v.strip().lower()
        if v not in _FLAGS:
            raise ValueError(f"bad mobility flag {v!r}")
        out.append(_FLAGS[v])
    return out


_PARSERS = {
    "hops": int,
    "omega_hat": _floats,
    "snr_db": _floats,
    "gain": _floats,
    "gain_c": _floats,
    "fm": float,
    "node_mobile": _flags,
    "node_doppler": _floats,
    "fm_ref": float,
    "grid": parse_grid,
    "methods": lambda s: [m.strip() for m in s.split(",") if m.strip()],
    "duration": float,
    "seed": int,
    "oscillators": int,
}


def parse_scenario(text: str) -> ScenarioFile:
    raw = {}
    lines = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in _PARSERS:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ScenarioError(f"line {lineno}: duplicate key {key!r}")
        try:
            raw[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ScenarioError(f"line {lineno}: {key}: {exc}") from None
        lines[key] = lineno

    if "hops" not in raw:
        raise ScenarioError("missing required key 'hops'")
    n = raw.pop("hops")

    def broadcast(key, length):
        if key not in raw:
            return None
        v = raw.pop(key)
        if len(v) == 1:
            return v * length
        if len(v) != length:
            raise ScenarioError(f"line {lines[key]}: {key} needs 1 or {length} values, got {len(v)}")
        return v

    omega_hat = broadcast("omega_hat", n) or [1.0] * n
    snr_db = broadcast("snr_db", n)
    fm = raw.pop("fm", None)
    mobile = raw.pop("node_mobile", None)
    nodes = raw.pop("node_doppler", None)
    if nodes is not None:
        if fm is not None or mobile is not None:
            raise ScenarioError(f"line {lines['node_doppler']}: node_doppler excludes fm/node_mobile")
        if len(nodes) != n + 1:
            raise ScenarioError(f"line {lines['node_doppler']}: need {n + 1} node shifts")
    else:
        if fm is None:
            raise ScenarioError("give fm (with optional node_mobile) or node_doppler")
        mobile = mobile if mobile is not None else [True] * (n + 1)
        if len(mobile) != n + 1:
            raise ScenarioError(f"line {lines['node_mobile']}: need {n + 1} mobility flags")
        nodes = [fm if m else 0.0 for m in mobile]
    try:
        return ScenarioFile(hops=n, omega_hat=omega_hat, node_doppler=nodes, snr_db=snr_db, **raw)
    except TypeError as exc:  # pragma: no cover - guarded by _PARSERS
        raise ScenarioError(str(exc)) from None


def load_scenario(path) -> ScenarioFile:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


# --------------------------------------------------------------------------
# Curves
# --------------------------------------------------------------------------


def laplace_curve(cascade: CascadeSpec, grid: ThresholdGrid) -> SecondOrderCurve:
    ys = grid.values
    if cascade.n_hops == 1:
        f1 = math.sqrt(cascade.f_sq[0])
        lcr = np.atleast_1d(analytic.rayleigh_lcr(cascade.omegas[0], f1, ys))
    else:
        lcr = np.atleast_1d(analytic.laplace_lcr(cascade, ys))
    cdf = np.atleast_1d(cdf_product_rayleigh(ys, cascade))
    return SecondOrderCurve(ys, lcr, _afd(cdf, lcr), "laplace")


def exact_curve(cascade: CascadeSpec, grid: ThresholdGrid,
                q: exact.QuadratureSpec = exact.DEFAULT_QUAD) -> SecondOrderCurve:
    ys = grid.values
    if cascade.n_hops == 1:
        # a single Rayleigh hop has a closed-form crossing rate
        lcr = np.atleast_1d(analytic.rayleigh_lcr(cascade.omegas[0], math.sqrt(cascade.f_sq[0]), ys))
    else:
        lcr = exact.exact_lcr_curve(cascade, ys, q)
    cdf = np.atleast_1d(cdf_product_rayleigh(ys, cascade))
    return SecondOrderCurve(ys, lcr, _afd(cdf, lcr), "exact")


def simulated_curve(cascade: CascadeSpec, grid: ThresholdGrid, t: simulator.TraceSpec) -> SecondOrderCurve:
    trace = simulator.cascade_trace(cascade, t)
    est = simulator.estimate_lcr_afd(trace, grid)
    return SecondOrderCurve(grid.values, est.lcr, est.afd, "simulated", est.lcr_se, est.afd_se)


def _afd(cdf, lcr):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(lcr > 0, cdf / lcr, np.nan)


def compute_curves(scenario: ScenarioFile, method: str, grid=None, seed=None) -> list:
    """Curves for ``method`` in exact/laplace/simulate, or ``all`` of the scenario's methods."""
    cascade = scenario.cascade()
    tg = scenario.threshold_grid(grid)
    if method == "all":
        methods = list(METHODS)
        if cascade.n_hops > exact.MAX_EXACT_HOPS:
            methods.remove("exact")
    elif method in METHODS:
        methods = [method]
    else:
        raise ScenarioError(f"unknown method {method!r}")
    if "exact" in methods and cascade.n_hops > exact.MAX_EXACT_HOPS:
        raise ScenarioError(
            f"exact method supports N <= {exact.MAX_EXACT_HOPS} hops, scenario has N = {cascade.n_hops}"
        )
    curves = []
    for m in methods:
        if m == "laplace":
            curves.append(laplace_curve(cascade, tg))
        elif m == "exact":
            curves.append(exact_curve(cascade, tg))
        else:
            curves.append(simulated_curve(cascade, tg, scenario.trace_spec(seed)))
    return curves


# --------------------------------------------------------------------------
# Published figure scenarios
# --------------------------------------------------------------------------

FIGURES = {
    2: ("lcr", (5.0,) * 5),
    3: ("afd", (5.0,) * 5),
    4: ("lcr", (20.0,) * 5),
    5: ("afd", (20.0,) * 5),
    6: ("lcr", (0.0, 10.0, 15.0, 15.0, 20.0)),
    7: ("afd", (0.0, 10.0, 15.0, 15.0, 20.0)),
}


def figure_scenario(fig_id: int, n_hops: int, fm: float = 1.0, omega_hat: float = 1.0,
                    grid=DEFAULT_GRID, duration: Optional[float] = None, seed: int = 0) -> ScenarioFile:
    """Curve ``N = n_hops`` of a figure: mobile source and relays, fixed receiving node.

    Relays are semi-blind; per-hop SNRs come from the figure caption.
    """
    if fig_id not in FIGURES:
        raise ScenarioError(f"unknown figure {fig_id}; expected one of {sorted(FIGURES)}")
    _, snrs = FIGURES[fig_id]
    return ScenarioFile(
        hops=n_hops,
        omega_hat=[omega_hat] * n_hops,
        node_doppler=[fm] * n_hops + [0.0],
        snr_db=list(snrs[:n_hops]),
        fm_ref=fm,
        grid=tuple(grid),
        methods=["laplace", "simulate"],
        duration=duration,
        seed=seed,
    )


def figure_curves(fig_id: int, fm: float = 1.0, grid=DEFAULT_GRID, duration=None, seed: int = 0) -> dict:
    """Laplace and simulated curves for every tap of a figure, keyed by N."""
    out = {}
    for n in FIGURE_TAPS:
        sc = figure_scenario(fig_id, n, fm=fm, grid=grid, duration=duration, seed=seed)
        out[n] = (sc, compute_curves(sc, "laplace") + compute_curves(sc, "simulate"))
    return out
