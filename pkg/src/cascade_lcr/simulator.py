"""Sum-of-sinusoids simulation of cascaded Rayleigh fading and crossing statistics.

Each hop is a complex process ``I(t) + jQ(t)`` whose branches are sums of
``M`` unit cosines with random phases.  Branch frequencies sit at
quantiles ``(k + theta) / M`` of the hop's (one-sided) Doppler spectrum,
with an independent random offset ``theta`` per branch, and are then
rescaled so their mean square equals the spectrum's second moment.  That
makes the time-averaged power and envelope-derivative variance exact for
every realisation:

* fixed-to-mobile (Jakes): ``|nu| = fm sin(pi u / 2)`` for ``u`` uniform;
* mobile-to-mobile (double ring): ``|nu| = |f_tx cos a + f_rx cos b|`` for
  independent uniform angles, quantiles taken numerically.

Random streams: hop ``k`` of a cascade, repetition ``r`` draws from
``SeedSequence(seed, spawn_key=(k, r))``.  Single-hop generators default to
``(0, 0)`` so a one-hop cascade reproduces them bit for bit.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .csvio import render, write_atomic
from .core import CascadeSpec, FixedToMobile, MobileToMobile, ThresholdGrid

DEFAULT_OVERSAMPLE = 128
MIN_OVERSAMPLE = 8
MIN_FADE_CYCLES = 100
_CHUNK = 1 << 15


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class TraceSpec:
    """Sampling and randomness for a simulated trace.

    ``sample_rate=None`` picks ``oversample`` times the summed maximum
    Doppler of the hops being generated.
    """

    duration: float
    seed: int = 0
    sample_rate: Optional[float] = None
    oscillators: int = 32
    oversample: float = DEFAULT_OVERSAMPLE

    def __post_init__(self):
        if not self.duration > 0:
            raise SimulationError("duration must be > 0")
        if self.oscillators < 4:
            raise SimulationError("need at least 4 oscillators per branch")
        if self.sample_rate is not None and not self.sample_rate > 0:
            raise SimulationError("sample_rate must be > 0")

    def resolve_rate(self, max_doppler_sum: float, min_positive_doppler: float) -> float:
        rate = self.oversample * max_doppler_sum if self.sample_rate is None else self.sample_rate
        if rate < MIN_OVERSAMPLE * max_doppler_sum:
            raise SimulationError(
                f"sample rate {rate:g} Hz is below {MIN_OVERSAMPLE} x the summed maximum Doppler "
                f"({max_doppler_sum:g} Hz)"
            )
        if self.duration * min_positive_doppler < MIN_FADE_CYCLES:
            raise SimulationError(
                f"duration {self.duration:g} s covers fewer than {MIN_FADE_CYCLES} fade cycles "
                f"at {min_positive_doppler:g} Hz"
            )
        return float(rate)


@dataclass(frozen=True)
class FadingTrace:
    sample_rate: float
    samples: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) / self.sample_rate

    def mean_power(self) -> float:
        return float(np.mean(self.samples**2))


def _rng(seed: int, key) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(key)))


# --------------------------------------------------------------------------
# Doppler quantiles
# --------------------------------------------------------------------------


def jakes_quantiles(fm: float, u: np.ndarray) -> np.ndarray:
    return fm * np.sin(0.5 * np.pi * np.asarray(u))


@functools.lru_cache(maxsize=32)
def _double_ring_sorted(ratio: float, grid: int = 1200) -> np.ndarray:
    a = (np.arange(grid) + 0.5) * np.pi / grid
    ca = np.cos(a)
    return np.sort(np.abs(ca[:, None] + ratio * ca[None, :]).ravel())


def double_ring_quantiles(f_tx: float, f_rx: float, u: np.ndarray) -> np.ndarray:
    """Quantiles of ``|f_tx cos a + f_rx cos b|`` with uniform angles."""
    big, small = max(f_tx, f_rx), min(f_tx, f_rx)
    table = _double_ring_sorted(round(small / big, 12))
    return big * np.quantile(table, np.asarray(u))


def _branch_frequencies(quantile_fn, second_moment: float, m: int, rng) -> np.ndarray:
    theta = rng.uniform()
    nu = quantile_fn((np.arange(m) + theta) / m)
    return nu * math.sqrt(second_moment / np.mean(nu**2))


def _sum_of_sinusoids(freq_i, freq_q, phase_i, phase_q, rate: float, n: int, omega: float):
    """Envelope ``sqrt(omega) |I + jQ|`` with branches of power 1/2 each."""
    out = np.empty(n)
    w = 2 * np.pi * np.concatenate([freq_i, freq_q]) / rate
    phase = np.concatenate([phase_i, phase_q])
    m_i = len(freq_i)
    # cos(w(k0 + j) + p) = Re(e^{iwj} e^{i(wk0 + p)}): one fixed table, one phasor per block
    table = np.exp(1j * np.outer(np.arange(min(n, _CHUNK)), w))
    weights = np.concatenate([np.full(m_i, 1.0 / m_i), np.full(len(freq_q), 1.0 / len(freq_q))])
    amp = np.sqrt(weights)
    scale = math.sqrt(omega)
    for start in range(0, n, _CHUNK):
        stop = min(n, start + _CHUNK)
        block = np.exp(1j * (w * start + phase)) * amp
        tab = table[: stop - start]
        i_part = (tab[:, :m_i] @ block[:m_i]).real
        q_part = (tab[:, m_i:] @ block[m_i:]).real
        out[start:stop] = scale * np.hypot(i_part, q_part)
    return out


def _hop_samples(omega: float, doppler, rate: float, n: int, m: int, rng) -> np.ndarray:
    if isinstance(doppler, MobileToMobile) and min(doppler.fm_tx, doppler.fm_rx) == 0:
        doppler = FixedToMobile(max(doppler.fm_tx, doppler.fm_rx))
    if isinstance(doppler, FixedToMobile):
        fm = doppler.fm
        if fm == 0:
            # frozen channel: one Rayleigh draw held for the whole trace
            return np.full(n, math.sqrt(omega * rng.exponential()))
        qfn = functools.partial(jakes_quantiles, fm)
        moment = fm * fm / 2
    else:
        f1, f2 = doppler.fm_tx, doppler.fm_rx
        qfn = functools.partial(double_ring_quantiles, f1, f2)
        moment = (f1 * f1 + f2 * f2) / 2
    freq_i = _branch_frequencies(qfn, moment, m, rng)
    freq_q = _branch_frequencies(qfn, moment, m, rng)
    phases = rng.uniform(0.0, 2 * np.pi, size=(2, m))
    return _sum_of_sinusoids(freq_i, freq_q, phases[0], phases[1], rate, n, omega)


def _n_samples(t: TraceSpec, rate: float) -> int:
    return int(round(t.duration * rate))


def gen_f2m_trace(omega: float, fm: float, t: TraceSpec, stream=(0, 0)) -> FadingTrace:
    """Rayleigh envelope of a fixed-to-mobile link (Jakes spectrum)."""
    if not fm > 0:
        raise SimulationError("fixed-to-mobile trace needs fm > 0")
    if not omega > 0:
        raise SimulationError("omega must be > 0")
    rate = t.resolve_rate(fm, fm)
    n = _n_samples(t, rate)
    samples = _hop_samples(omega, FixedToMobile(fm), rate, n, t.oscillators, _rng(t.seed, stream))
    return FadingTrace(rate, samples, {"kind": "fixed-to-mobile", "omega": omega, "fm": fm,
                                       "seed": t.seed, "stream": tuple(stream)})


def gen_m2m_trace(omega: float, fm_tx: float, fm_rx: float, t: TraceSpec,
                  stream=(0, 0)) -> FadingTrace:
    """Rayleigh envelope of a mobile-to-mobile link (double-ring spectrum)."""
    if not fm_tx + fm_rx > 0:
        raise SimulationError("mobile-to-mobile trace needs fm_tx + fm_rx > 0")
    if not omega > 0:
        raise SimulationError("omega must be > 0")
    d = MobileToMobile(fm_tx, fm_rx)
    rate = t.resolve_rate(fm_tx + fm_rx, math.hypot(fm_tx, fm_rx))
    n = _n_samples(t, rate)
    samples = _hop_samples(omega, d, rate, n, t.oscillators, _rng(t.seed, stream))
    return FadingTrace(rate, samples, {"kind": "mobile-to-mobile", "omega": omega,
                                       "fm_tx": fm_tx, "fm_rx": fm_rx, "seed": t.seed,
                                       "stream": tuple(stream)})


def cascade_trace(cascade: CascadeSpec, t: TraceSpec, repetition: int = 0) -> FadingTrace:
    """Product of independently seeded hop envelopes times the relay gains."""
    cascade.require_time_varying()
    max_sum = float(np.sum(cascade.max_dopplers))
    f_eff = np.sqrt(cascade.f_sq)
    rate = t.resolve_rate(max_sum, float(np.min(f_eff[f_eff > 0])))
    n = _n_samples(t, rate)
    gains = cascade.gain_values
    product = np.ones(n)
    for k, (hop, d) in enumerate(zip(cascade.hops, cascade.dopplers)):
        rng = _rng(t.seed, (k, repetition))
        product *= gains[k] * _hop_samples(hop.omega_hat, d, rate, n, t.oscillators, rng)
    return FadingTrace(rate, product, {"kind": "cascade", "n_hops": cascade.n_hops,
                                       "phi": cascade.phi, "seed": t.seed,
                                       "repetition": repetition})


def write_trace_csv(trace: FadingTrace, path) -> None:
    """Plain CSV with header ``t_seconds,amplitude``, written atomically."""
    rows = ((repr(float(ti)), repr(float(a))) for ti, a in zip(trace.times, trace.samples))
    write_atomic(path, render(("t_seconds", "amplitude"), rows))


# --------------------------------------------------------------------------
# Crossing statistics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SimEstimate:
    """Event-count estimates per threshold.

    ``afd`` is NaN and ``undefined`` True where no downward crossing occurred.
    Standard errors come from batch means over contiguous blocks.
    """

    threshold: np.ndarray
    crossings: np.ndarray
    time_below: np.ndarray
    duration: float
    lcr: np.ndarray
    afd: np.ndarray
    undefined: np.ndarray
    lcr_se: np.ndarray
    afd_se: np.ndarray

    @property
    def cdf(self) -> np.ndarray:
        return self.time_below / self.duration


def _count(samples: np.ndarray, ys: np.ndarray):
    """Downward crossings (``a >= y > b`` for consecutive samples) and samples below."""
    a, b = samples[:-1], samples[1:]
    down = b < a
    hi = np.sort(a[down])
    lo = np.sort(b[down])
    crossings = np.searchsorted(lo, ys, "left") - np.searchsorted(hi, ys, "left")
    below = np.searchsorted(np.sort(samples), ys, "left")
    return crossings.astype(np.int64), below.astype(np.int64)


def estimate_lcr_afd(trace: FadingTrace, grid: ThresholdGrid | np.ndarray, blocks: int = 20) -> SimEstimate:
    """Level crossing rate and average fade duration by counting events.

    A sample equal to the threshold counts as above it.
    """
    x = np.asarray(trace.samples, dtype=float)
    if len(x) < 2:
        raise SimulationError("trace needs at least two samples")
    ys = np.asarray(grid.values if isinstance(grid, ThresholdGrid) else grid, dtype=float)
    dt = 1.0 / trace.sample_rate
    duration = len(x) * dt
    crossings, below = _count(x, ys)
    time_below = below * dt
    lcr = crossings / duration
    undefined = crossings == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        afd = np.where(undefined, np.nan, time_below / np.maximum(crossings, 1))

    # batch means; boundary pairs between blocks are ignored here only
    blocks = max(2, min(blocks, len(x) // 2))
    edges = np.linspace(0, len(x), blocks + 1).astype(int)
    c_b = np.empty((blocks, len(ys)))
    t_b = np.empty((blocks, len(ys)))
    d_b = np.empty(blocks)
    for i in range(blocks):
        seg = x[edges[i]:edges[i + 1]]
        cc, bb = _count(seg, ys)
        c_b[i], t_b[i], d_b[i] = cc, bb * dt, len(seg) * dt
    lcr_se = np.std(c_b / d_b[:, None], axis=0, ddof=1) / math.sqrt(blocks)
    with np.errstate(divide="ignore", invalid="ignore"):
        mc, mt = c_b.mean(axis=0), t_b.mean(axis=0)
        cov = np.array([np.cov(c_b[:, j], t_b[:, j], ddof=1) for j in range(len(ys))])
        rel_var = cov[:, 1, 1] / mt**2 + cov[:, 0, 0] / mc**2 - 2 * cov[:, 0, 1] / (mc * mt)
        afd_se = np.where(undefined, np.nan, np.abs(afd) * np.sqrt(np.maximum(rel_var, 0) / blocks))
    return SimEstimate(ys, crossings, time_below, duration, lcr, afd, undefined, lcr_se, afd_se)
