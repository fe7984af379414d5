"""Closed-form Laplace approximations of the cascade LCR and AFD.

The exact LCR of a product of ``N`` Rayleigh envelopes is an
``(N-1)``-dimensional integral of the form ``int u(x) exp(-h(x)) dx``.
Expanding ``h`` to second order around its single interior minimum gives a
closed form whose Doppler dependence enters only through the mean squared
effective Doppler ``sum(f_i**2) / N``.

This module also hosts a generic multivariate Laplace engine (numerical
minimiser plus finite-difference Hessian) used to cross-check the
analytic apparatus.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .core import CascadeSpec, ChannelError
from .specialfn import CdfEvalOptions, DEFAULT_OPTS, cdf_product_rayleigh


class LaplaceError(ArithmeticError):
    """The Laplace approximation is not applicable or its minimiser failed."""


def _check_multi_hop(cascade: CascadeSpec):
    if cascade.n_hops < 2:
        raise ChannelError("a single hop has no free integration variables")


def _positive(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ChannelError("thresholds must be > 0")
    return y


def _scalar_or_array(v):
    v = np.asarray(v)
    return float(v) if v.ndim == 0 else v


# --------------------------------------------------------------------------
# Critical point and Hessian of the exponent
# --------------------------------------------------------------------------


def lcr_critical_point(cascade: CascadeSpec, y: float) -> np.ndarray:
    """Interior minimiser ``x_i = y**(1/N) sqrt(Omega_i) / phi**(1/(2N))``, ``i < N``."""
    _check_multi_hop(cascade)
    y = float(_positive(y))
    n = cascade.n_hops
    om = cascade.omegas[:-1]
    return y ** (1.0 / n) * np.sqrt(om) / cascade.phi ** (1.0 / (2 * n))


@dataclass(frozen=True)
class HessianInfo:
    matrix: np.ndarray
    eigenvalues: np.ndarray  # closed-form list; exact only for equal powers
    determinant: float


def lcr_hessian(cascade: CascadeSpec) -> HessianInfo:
    """Hessian of the exponent at the critical point, with closed-form spectrum.

    Entries are ``8/Omega_i`` on the diagonal and ``4/sqrt(Omega_i Omega_j)``
    off it; the determinant is ``N 4**(N-1) / prod(Omega_1..Omega_{N-1})``.
    The eigenvalue list ``{4/Omega_i (i <= N-2), 4N/Omega_{N-1}}`` is the
    published closed form; it coincides with the true spectrum only when
    the first ``N-1`` powers are equal.
    """
    _check_multi_hop(cascade)
    n = cascade.n_hops
    om = cascade.omegas[:-1]
    inv_sqrt = 1.0 / np.sqrt(om)
    a = 4.0 * np.outer(inv_sqrt, inv_sqrt)
    a[np.diag_indices_from(a)] = 8.0 / om
    eig = np.concatenate([4.0 / om[:-1], [4.0 * n / om[-1]]])
    det = n * 2.0 ** (2 * (n - 1)) / float(np.prod(om))
    return HessianInfo(a, eig, det)


def lcr_exponent(cascade: CascadeSpec, y: float) -> Callable[[np.ndarray], float]:
    """``h(x) = y^2/(Omega_N prod x_i^2) + sum x_i^2/Omega_i`` over the first ``N-1`` hops."""
    om = cascade.omegas
    y2 = float(y) ** 2

    def h(x):
        x = np.asarray(x, dtype=float)
        x2 = x * x
        return y2 / (om[-1] * np.prod(x2)) + np.sum(x2 / om[:-1])

    return h


def lcr_amplitude(cascade: CascadeSpec, y: float) -> Callable[[np.ndarray], float]:
    """Square-root factor of the LCR integrand, normalised by the last hop's Doppler."""
    om = cascade.omegas
    f2 = cascade.f_sq
    if f2[-1] <= 0:
        raise ChannelError("normalised amplitude factor needs a time-varying last hop")
    ratio = om[:-1] * f2[:-1] / (om[-1] * f2[-1])
    y2 = float(y) ** 2

    def u(x):
        x2 = np.asarray(x, dtype=float) ** 2
        return math.sqrt(1.0 + y2 / np.prod(x2) * np.sum(ratio / x2))

    return u


def lcr_integral_prefactor(cascade: CascadeSpec, y: float) -> float:
    """Factor ``2^N y sigma_N / (sqrt(2 pi) phi)`` in front of the LCR integral."""
    n = cascade.n_hops
    sigma_n = math.sqrt(math.pi**2 * cascade.omegas[-1] * cascade.f_sq[-1])
    return 2.0**n * float(y) * sigma_n / (math.sqrt(2 * math.pi) * cascade.phi)


# --------------------------------------------------------------------------
# Closed-form LCR / AFD
# --------------------------------------------------------------------------


def laplace_lcr(cascade: CascadeSpec, y):
    """Approximate crossings per second of the cascade amplitude at ``y``.

    ``sqrt(sum f_i^2 / N) (2 pi)^(N/2) y / sqrt(phi) exp(-N (y^2/phi)^(1/N))``
    """
    cascade.require_time_varying()
    y = _positive(y)
    n = cascade.n_hops
    ph = cascade.phi
    doppler_rms = math.sqrt(cascade.doppler_sum_sq / n)
    out = doppler_rms * (2 * math.pi) ** (n / 2) * y / math.sqrt(ph) * np.exp(
        -n * (y * y / ph) ** (1.0 / n)
    )
    return _scalar_or_array(out)


def rayleigh_lcr(omega: float, f1: float, y):
    """Crossing rate of a single Rayleigh envelope."""
    if not (omega > 0 and f1 > 0):
        raise ChannelError("rayleigh_lcr needs omega > 0 and f1 > 0")
    y = _positive(y)
    rho = y / math.sqrt(omega)
    return _scalar_or_array(f1 * math.sqrt(2 * math.pi) * rho * np.exp(-rho * rho))


def laplace_afd(cascade: CascadeSpec, y, opts: CdfEvalOptions = DEFAULT_OPTS):
    """Average fade duration as CDF over the approximate LCR."""
    y = _positive(y)
    lcr = np.asarray(laplace_lcr(cascade, y))
    if np.any(lcr <= 0):
        raise ChannelError("crossing rate underflowed to zero; fade duration undefined")
    return _scalar_or_array(np.asarray(cdf_product_rayleigh(y, cascade, opts)) / lcr)


def laplace_afd_closed(cascade: CascadeSpec, y, opts: CdfEvalOptions = DEFAULT_OPTS):
    """Literal closed-form AFD, with the exponential written as a growth factor."""
    cascade.require_time_varying()
    y = _positive(y)
    n = cascade.n_hops
    ph = cascade.phi
    cdf = np.asarray(cdf_product_rayleigh(y, cascade, opts))
    out = (
        (cascade.doppler_sum_sq / n) ** -0.5
        * math.sqrt(ph) / (2 * math.pi) ** (n / 2) / y
        * cdf * np.exp(n * y ** (2.0 / n) / ph ** (1.0 / n))
    )
    return _scalar_or_array(out)


# special cases ---------------------------------------------------------------


def lcr_equal_power(f_sq: Sequence[float], omega: float, y):
    """All hops share one effective power ``omega``."""
    f_sq = np.asarray(f_sq, dtype=float)
    n = len(f_sq)
    y = _positive(y)
    out = math.sqrt(f_sq.sum() / n) * (2 * math.pi) ** (n / 2) * y / omega ** (n / 2) * np.exp(
        -n * y ** (2.0 / n) / omega
    )
    return _scalar_or_array(out)


def _lcr_common_doppler(prefactor: float, n: int, phi_value: float, y):
    y = _positive(y)
    out = prefactor * (2 * math.pi) ** (n / 2) * y / math.sqrt(phi_value) * np.exp(
        -n * y ** (2.0 / n) / phi_value ** (1.0 / n)
    )
    return _scalar_or_array(out)


def lcr_all_mobile(n: int, fm: float, phi_value: float, y):
    """Every node moves with the same maximum Doppler ``fm``."""
    return _lcr_common_doppler(math.sqrt(2.0) * fm, n, phi_value, y)


def lcr_fixed_destination(n: int, fm: float, phi_value: float, y):
    """Source and relays move with ``fm``; the destination is fixed."""
    return _lcr_common_doppler(fm * math.sqrt((2 * n - 1) / n), n, phi_value, y)


SPECIAL_CASES = {
    "equal-power": lcr_equal_power,
    "all-mobile": lcr_all_mobile,
    "fixed-destination": lcr_fixed_destination,
}


def special_case_lcr(scenario: str, **params):
    try:
        fn = SPECIAL_CASES[scenario]
    except KeyError:
        raise ChannelError(
            f"unknown special case {scenario!r}; expected one of {sorted(SPECIAL_CASES)}"
        ) from None
    return fn(**params)


# --------------------------------------------------------------------------
# Generic Laplace engine
# --------------------------------------------------------------------------


@dataclass
class LaplaceProblem:
    """``J(lam) = int u(x) exp(-lam h(x)) dx`` over R^n or the positive orthant."""

    dimension: int
    u: Callable[[np.ndarray], float]
    h: Callable[[np.ndarray], float]
    lam: float = 1.0
    domain: str = "positive"

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not self.lam > 0:
            raise ValueError("lambda must be > 0")
        if self.domain not in ("positive", "real"):
            raise ValueError("domain is 'positive' or 'real'")


@dataclass(frozen=True)
class LaplaceResult:
    critical_point: np.ndarray
    hessian: np.ndarray
    det_a: float
    u_at_crit: float
    h_at_crit: float
    approx_value: float
    gradient_norm: float


def _fd_steps(x: np.ndarray) -> np.ndarray:
    return np.maximum(1e-5 * np.abs(x), 1e-7)


def fd_gradient(h, x: np.ndarray, steps=None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    d = _fd_steps(x) if steps is None else steps
    g = np.empty_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = d[i]
        g[i] = (h(x + e) - h(x - e)) / (2 * d[i])
    return g


def fd_hessian(h, x: np.ndarray) -> np.ndarray:
    """Central-difference Hessian, symmetric by construction."""
    x = np.asarray(x, dtype=float)
    d = _fd_steps(x)
    n = len(x)
    h0 = h(x)
    a = np.empty((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = d[i]
        a[i, i] = (h(x + ei) - 2 * h0 + h(x - ei)) / d[i] ** 2
        for j in range(i):
            ej = np.zeros(n)
            ej[j] = d[j]
            v = (h(x + ei + ej) - h(x + ei - ej) - h(x - ei + ej) + h(x - ei - ej)) / (4 * d[i] * d[j])
            a[i, j] = a[j, i] = v
    return a


def _scaled_gradient(h, x, positive):
    g = fd_gradient(h, x)
    scale = np.abs(x) if positive else np.maximum(np.abs(x), 1.0)
    return float(np.linalg.norm(g * scale) / max(1.0, abs(h(x))))


def _minimise(p: LaplaceProblem, x0: np.ndarray, grad_tol: float, max_newton: int = 50):
    positive = p.domain == "positive"
    if positive:
        if np.any(x0 <= 0):
            raise LaplaceError("starting point must be strictly positive")
        res = optimize.minimize(lambda v: p.h(np.exp(v)), np.log(x0), method="BFGS",
                                options={"gtol": 1e-10, "maxiter": 2000})
        x = np.exp(res.x)
    else:
        res = optimize.minimize(p.h, x0, method="BFGS", options={"gtol": 1e-10, "maxiter": 2000})
        x = np.asarray(res.x, dtype=float)

    # Newton polish with finite differences
    for _ in range(max_newton):
        if _scaled_gradient(p.h, x, positive) <= grad_tol:
            break
        g = fd_gradient(p.h, x)
        a = fd_hessian(p.h, x)
        try:
            step = np.linalg.solve(a, g)
        except np.linalg.LinAlgError:
            break
        t = 1.0
        h_x = p.h(x)
        while t > 1e-6:
            cand = x - t * step
            if (not positive or np.all(cand > 0)) and p.h(cand) <= h_x:
                break
            t *= 0.5
        else:
            break
        x = cand
    gn = _scaled_gradient(p.h, x, positive)
    if not gn <= grad_tol:
        raise LaplaceError(f"minimiser did not converge (scaled gradient {gn:.3g})")
    return x, gn


def _probe_global_minimum(p: LaplaceProblem, x: np.ndarray, h_min: float):
    """Coarse search for points lower than the located minimum."""
    if p.dimension > 6:
        return
    if p.domain == "positive":
        factors = [0.01, 0.1, 0.5, 2.0, 10.0, 100.0]
        candidates = (x * np.array(c) for c in itertools.product(factors, repeat=p.dimension))
    else:
        shifts = [-100.0, -10.0, -1.0, 1.0, 10.0, 100.0]
        candidates = (x + np.array(c) for c in itertools.product(shifts, repeat=p.dimension))
    tol = 1e-9 * max(1.0, abs(h_min))
    for c in candidates:
        with np.errstate(all="ignore"):
            v = p.h(c)
        if np.isfinite(v) and v < h_min - tol:
            warnings.warn(
                f"h takes a lower value ({v:.6g} < {h_min:.6g}) away from the located minimum; "
                "the Laplace approximation may be inaccurate",
                RuntimeWarning,
                stacklevel=3,
            )
            return


def generic_laplace_approx(p: LaplaceProblem, x0, grad_tol: float = 1e-8) -> LaplaceResult:
    """Laplace approximation ``(2 pi/lam)^(n/2) u(x) exp(-lam h(x)) / sqrt(det A)``.

    The minimiser of ``h`` is located numerically from ``x0`` and ``A`` is
    the central-difference Hessian of ``h`` there (per-component step
    ``max(1e-5 |x_i|, 1e-7)``).
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (p.dimension,):
        raise ValueError(f"x0 must have shape ({p.dimension},)")
    x, gn = _minimise(p, x0, grad_tol)
    a = fd_hessian(p.h, x)
    a = 0.5 * (a + a.T)
    eig = np.linalg.eigvalsh(a)
    if not np.all(eig > 0):
        raise LaplaceError(f"Hessian at the minimum is not positive definite (eigenvalues {eig})")
    det_a = float(np.prod(eig))
    h_min = float(p.h(x))
    _probe_global_minimum(p, x, h_min)
    u_val = float(p.u(x))
    approx = (2 * math.pi / p.lam) ** (p.dimension / 2) * u_val / math.sqrt(det_a) * math.exp(
        -p.lam * h_min
    )
    return LaplaceResult(x, a, det_a, u_val, h_min, approx, gn)


def lcr_laplace_problem(cascade: CascadeSpec, y: float) -> tuple[LaplaceProblem, float]:
    """The LCR integral as a Laplace problem plus the prefactor multiplying it."""
    _check_multi_hop(cascade)
    prob = LaplaceProblem(
        cascade.n_hops - 1, lcr_amplitude(cascade, y), lcr_exponent(cascade, y), 1.0, "positive"
    )
    return prob, lcr_integral_prefactor(cascade, y)
