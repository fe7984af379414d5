"""Domain types and derived channel parameters for cascaded Rayleigh links.

A cascade is an ordered list of hops.  Hop ``i`` carries a Rayleigh
amplitude with mean power ``omega_hat`` and is scaled by the amplitude gain
of the node that transmits into it (the source gain is 1).  The effective
per-hop power is ``omega_hat * G_prev**2`` and the cascade scale parameter
``phi`` is the product of the effective powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import relay


class ChannelError(ValueError):
    """Invalid channel description or an operation undefined for it."""


# --------------------------------------------------------------------------
# Doppler models
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FixedToMobile:
    """One moving end; ``fm`` is its maximum Doppler shift in Hz."""

    fm: float

    def __post_init__(self):
        if not self.fm >= 0:
            raise ChannelError(f"Doppler frequency must be >= 0, got {self.fm}")


@dataclass(frozen=True)
class MobileToMobile:
    """Both ends moving with maximum Doppler shifts ``fm_tx`` and ``fm_rx``."""

    fm_tx: float
    fm_rx: float

    def __post_init__(self):
        if not (self.fm_tx >= 0 and self.fm_rx >= 0):
            raise ChannelError(
                f"Doppler frequencies must be >= 0, got ({self.fm_tx}, {self.fm_rx})"
            )


DopplerSpec = Union[FixedToMobile, MobileToMobile]


def effective_doppler(d: DopplerSpec) -> float:
    """Frequency ``f`` entering the envelope-derivative variance pi^2*Omega*f^2."""
    if isinstance(d, FixedToMobile):
        return float(d.fm)
    return math.hypot(d.fm_tx, d.fm_rx)


def max_doppler(d: DopplerSpec) -> float:
    """Largest Doppler shift present in the hop's spectrum."""
    if isinstance(d, FixedToMobile):
        return float(d.fm)
    return float(d.fm_tx + d.fm_rx)


def derivative_variance(omega: float, f: float) -> float:
    return math.pi**2 * omega * f**2


def phi(omegas: Sequence[float]) -> float:
    """Product of the effective per-hop powers."""
    omegas = np.asarray(omegas, dtype=float)
    if np.any(omegas <= 0):
        raise ChannelError("effective powers must be positive")
    return float(np.prod(omegas))


def hop_doppler_sq_from_nodes(node_dopplers: Sequence[float]) -> np.ndarray:
    """Per-hop ``f_i**2`` for a chain of ``N+1`` node Doppler shifts."""
    f = np.asarray(node_dopplers, dtype=float)
    if f.ndim != 1 or len(f) < 2:
        raise ChannelError("need at least two node Doppler shifts")
    if np.any(f < 0):
        raise ChannelError("node Doppler shifts must be >= 0")
    return f[:-1] ** 2 + f[1:] ** 2


def doppler_sum_sq(node_dopplers: Sequence[float]) -> float:
    """Sum of per-hop ``f_i**2`` composed hop by hop from node shifts."""
    return float(np.sum(hop_doppler_sq_from_nodes(node_dopplers)))


def doppler_sum_sq_closed(node_dopplers: Sequence[float]) -> float:
    # end nodes count once, every relay twice
    f = np.asarray(node_dopplers, dtype=float)
    return float(f[0] ** 2 + 2.0 * np.sum(f[1:-1] ** 2) + f[-1] ** 2)


def hop_doppler_from_nodes(f_prev: float, f_next: float) -> DopplerSpec:
    """Doppler model of a hop between two nodes; a zero shift marks a fixed node."""
    if f_prev > 0 and f_next > 0:
        return MobileToMobile(f_prev, f_next)
    return FixedToMobile(max(f_prev, f_next))


# --------------------------------------------------------------------------
# Hops and relay gains
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HopSpec:
    """One hop.  ``doppler`` is None when the cascade is built from node shifts."""

    omega_hat: float
    doppler: Optional[DopplerSpec] = None
    noise_variance: Optional[float] = None

    def __post_init__(self):
        if not self.omega_hat > 0:
            raise ChannelError(f"omega_hat must be > 0, got {self.omega_hat}")
        if self.noise_variance is not None and not self.noise_variance > 0:
            raise ChannelError("noise_variance must be > 0")

    @property
    def mean_snr(self) -> Optional[float]:
        if self.noise_variance is None:
            return None
        return self.omega_hat / self.noise_variance

    @classmethod
    def from_snr_db(cls, omega_hat: float, snr_db: float, doppler=None) -> "HopSpec":
        snr = db_to_power(snr_db)
        return cls(omega_hat, doppler, noise_variance=omega_hat / snr)


@dataclass(frozen=True)
class Unity:
    pass


@dataclass(frozen=True)
class FixedC:
    """Fixed gain ``G**2 = 1 / (c * W0)`` with ``W0`` the incoming hop's noise."""

    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ChannelError("fixed-gain constant must be > 0")


@dataclass(frozen=True)
class SemiBlind:
    """Fixed gain matched in mean power to a CSI-assisted relay."""


@dataclass(frozen=True)
class Explicit:
    g: float

    def __post_init__(self):
        if not self.g > 0:
            raise ChannelError("amplitude gain must be > 0")


RelayGainSpec = Union[Unity, FixedC, SemiBlind, Explicit]


def resolve_gain(gain: RelayGainSpec, incoming: Optional[HopSpec]) -> float:
    """Amplitude gain of a node given the hop it receives on (None for the source)."""
    if isinstance(gain, Unity):
        return 1.0
    if isinstance(gain, Explicit):
        return float(gain.g)
    if incoming is None:
        raise ChannelError("the source has no incoming hop; its gain must be Unity")
    if incoming.noise_variance is None:
        raise ChannelError(f"{type(gain).__name__} gain needs the incoming hop's noise variance")
    if isinstance(gain, FixedC):
        return math.sqrt(1.0 / (gain.c * incoming.noise_variance))
    if isinstance(gain, SemiBlind):
        return relay.semi_blind_gain(incoming.mean_snr, incoming.omega_hat)
    raise ChannelError(f"unknown gain mode {gain!r}")


# --------------------------------------------------------------------------
# Cascade
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CascadeSpec:
    """Ordered hops plus the gain of the node feeding each hop.

    Give Doppler information either on every hop or as ``node_dopplers``
    (``N + 1`` shifts, source first, destination last), never both.
    """

    hops: tuple
    gains: tuple = ()
    node_dopplers: Optional[tuple] = None
    _derived: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        hops = tuple(self.hops)
        object.__setattr__(self, "hops", hops)
        if len(hops) < 1:
            raise ChannelError("a cascade needs at least one hop")
        gains = tuple(self.gains) if self.gains else (Unity(),) * len(hops)
        if len(gains) != len(hops):
            raise ChannelError(f"expected {len(hops)} gains, got {len(gains)}")
        if not isinstance(gains[0], Unity):
            raise ChannelError("the first gain belongs to the source and must be Unity")
        object.__setattr__(self, "gains", gains)

        per_hop = [h.doppler is not None for h in hops]
        if self.node_dopplers is not None:
            if any(per_hop):
                raise ChannelError("give per-hop Doppler specs or node shifts, not both")
            nodes = tuple(float(f) for f in self.node_dopplers)
            if len(nodes) != len(hops) + 1:
                raise ChannelError(
                    f"{len(hops)} hops need {len(hops) + 1} node Doppler shifts, got {len(nodes)}"
                )
            if any(f < 0 for f in nodes):
                raise ChannelError("node Doppler shifts must be >= 0")
            object.__setattr__(self, "node_dopplers", nodes)
            dopplers = tuple(hop_doppler_from_nodes(a, b) for a, b in zip(nodes[:-1], nodes[1:]))
            f_sq = hop_doppler_sq_from_nodes(nodes)
        else:
            if not all(per_hop):
                raise ChannelError("every hop needs a Doppler spec when node shifts are absent")
            dopplers = tuple(h.doppler for h in hops)
            f_sq = np.array([effective_doppler(d) ** 2 for d in dopplers])

        g = [resolve_gain(gains[0], None)]
        g += [resolve_gain(gains[k], hops[k - 1]) for k in range(1, len(hops))]
        g = np.array(g)
        omega_hat = np.array([h.omega_hat for h in hops])
        self._derived.update(
            dopplers=dopplers,
            f_sq=f_sq,
            gain_values=g,
            omega_hat=omega_hat,
            omegas=omega_hat * g**2,
        )

    @classmethod
    def simple(cls, omegas: Sequence[float], freqs: Sequence[float] | float = 1.0) -> "CascadeSpec":
        """Unit-gain cascade of fixed-to-mobile hops with given powers and Dopplers."""
        omegas = list(np.atleast_1d(np.asarray(omegas, dtype=float)))
        freqs = np.broadcast_to(np.asarray(freqs, dtype=float), (len(omegas),))
        return cls(tuple(HopSpec(o, FixedToMobile(float(f))) for o, f in zip(omegas, freqs)))

    @classmethod
    def from_nodes(
        cls,
        omega_hats: Sequence[float],
        node_dopplers: Sequence[float],
        gains: Sequence[RelayGainSpec] = (),
        snr_db: Optional[Sequence[float]] = None,
    ) -> "CascadeSpec":
        if snr_db is None:
            hops = tuple(HopSpec(o) for o in omega_hats)
        else:
            if len(snr_db) != len(omega_hats):
                raise ChannelError("one SNR per hop is required")
            hops = tuple(HopSpec.from_snr_db(o, s) for o, s in zip(omega_hats, snr_db))
        return cls(hops, tuple(gains), tuple(node_dopplers))

    # derived quantities ----------------------------------------------------

    @property
    def n_hops(self) -> int:
        return len(self.hops)

    @property
    def dopplers(self) -> tuple:
        return self._derived["dopplers"]

    @property
    def gain_values(self) -> np.ndarray:
        return self._derived["gain_values"].copy()

    @property
    def omega_hats(self) -> np.ndarray:
        return self._derived["omega_hat"].copy()

    @property
    def omegas(self) -> np.ndarray:
        return self._derived["omegas"].copy()

    @property
    def phi(self) -> float:
        return phi(self._derived["omegas"])

    @property
    def f_sq(self) -> np.ndarray:
        return self._derived["f_sq"].copy()

    @property
    def doppler_sum_sq(self) -> float:
        return float(np.sum(self._derived["f_sq"]))

    @property
    def max_dopplers(self) -> np.ndarray:
        return np.array([max_doppler(d) for d in self.dopplers])

    def require_time_varying(self):
        if self.doppler_sum_sq <= 0:
            raise ChannelError("static channel: every Doppler shift is zero, crossing rate undefined")

    def permuted(self, order: Sequence[int]) -> "CascadeSpec":
        """Unit-gain cascade with the effective hops reordered (product is unchanged)."""
        om = self.omegas[list(order)]
        ds = [self.dopplers[i] for i in order]
        return CascadeSpec(tuple(HopSpec(o, d) for o, d in zip(om, ds)))

    def prefix(self, n: int) -> "CascadeSpec":
        """The first ``n`` hops, i.e. the signal as seen by node ``n``."""
        if not 1 <= n <= self.n_hops:
            raise ChannelError(f"prefix length must be in [1, {self.n_hops}]")
        nodes = None if self.node_dopplers is None else self.node_dopplers[: n + 1]
        return CascadeSpec(self.hops[:n], self.gains[:n], nodes)


# --------------------------------------------------------------------------
# Threshold grids and curves
# --------------------------------------------------------------------------


def db_to_power(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def amplitude_to_db(y, reference_power: float = 1.0):
    """Threshold axis in dB: ``20 log10(y / sqrt(reference_power))``."""
    return 20.0 * np.log10(np.asarray(y, dtype=float) / math.sqrt(reference_power))


def db_to_amplitude(db, reference_power: float = 1.0):
    return math.sqrt(reference_power) * 10.0 ** (np.asarray(db, dtype=float) / 20.0)


@dataclass(frozen=True)
class ThresholdGrid:
    """Strictly increasing positive amplitude thresholds."""

    values: np.ndarray
    reference_power: float = 1.0

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.values, dtype=float))
        if v.ndim != 1 or len(v) == 0:
            raise ChannelError("threshold grid must be a non-empty 1-D sequence")
        if np.any(v <= 0) or np.any(np.diff(v) <= 0):
            raise ChannelError("thresholds must be positive and strictly increasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_db(cls, lo_db: float, hi_db: float, step_db: float, reference_power: float = 1.0):
        if step_db <= 0 or hi_db < lo_db:
            raise ChannelError("grid needs lo <= hi and a positive step")
        n = int(math.floor((hi_db - lo_db) / step_db + 1e-9)) + 1
        db = lo_db + step_db * np.arange(n)
        return cls(db_to_amplitude(db, reference_power), reference_power)

    @property
    def db(self) -> np.ndarray:
        return amplitude_to_db(self.values, self.reference_power)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class SecondOrderCurve:
    """LCR and AFD over a threshold grid for one computation method.

    ``afd`` is NaN where ``lcr`` is zero.  Optional standard errors are
    filled for simulated curves.
    """

    threshold: np.ndarray
    lcr: np.ndarray
    afd: np.ndarray
    method: str
    lcr_se: Optional[np.ndarray] = None
    afd_se: Optional[np.ndarray] = None

    METHODS = ("exact", "laplace", "simulated")

    def __post_init__(self):
        if self.method not in self.METHODS:
            raise ChannelError(f"unknown method tag {self.method!r}")
