"""Semi-blind relay gains and the resulting cascade scale parameter."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .specialfn import gamma_upper_zero


def semi_blind_gain_sq(mean_snr: float, omega_hat: float) -> float:
    if not (mean_snr > 0 and omega_hat > 0):
        raise ValueError("semi-blind gain needs mean_snr > 0 and omega_hat > 0")
    inv = 1.0 / mean_snr
    return math.exp(inv) * gamma_upper_zero(inv) / omega_hat


def semi_blind_gain(mean_snr: float, omega_hat: float) -> float:
    """Fixed amplitude gain with the mean power draw of a CSI-assisted relay."""
    return math.sqrt(semi_blind_gain_sq(mean_snr, omega_hat))


def scenario_phi(scenario: str, omega_hat1: float, snrs: Sequence[float], n_hops=None) -> float:
    """Cascade scale parameter for equal-power hops behind semi-blind relays.

    ``snrs`` are linear per-hop mean SNRs.  Only the ``N - 1`` hops that
    feed a relay matter; with ``n_hops`` given, ``snrs`` may list all ``N``
    hops (the last entry is ignored) or just the first ``N - 1``.
    """
    snrs = [float(s) for s in snrs]
    if n_hops is not None:
        if len(snrs) not in (n_hops - 1, n_hops):
            raise ValueError(f"{n_hops} hops need {n_hops - 1} or {n_hops} SNRs, got {len(snrs)}")
        snrs = snrs[: n_hops - 1]
    if any(s <= 0 for s in snrs):
        raise ValueError("SNRs must be positive")
    if scenario == "equal-snr":
        if len(set(snrs)) > 1:
            raise ValueError("equal-snr scenario got differing SNRs")
        if not snrs:
            return float(omega_hat1)
        g = snrs[0]
        k = len(snrs)
        return omega_hat1 * math.exp(k / g) * gamma_upper_zero(1.0 / g) ** k
    if scenario == "unequal-snr":
        inv = np.array([1.0 / s for s in snrs])
        return float(omega_hat1 * math.exp(inv.sum()) * np.prod([gamma_upper_zero(v) for v in inv]))
    raise ValueError(f"unknown scenario {scenario!r}")
