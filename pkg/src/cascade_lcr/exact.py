"""Exact cascade LCR/AFD by direct quadrature of the Rice-formula integral.

With ``x_i = c_i exp(u_i)`` the integrand decays doubly exponentially in
every direction of ``u``, so a tensor trapezoid rule on a uniform grid
converges geometrically.  The step is halved until two successive
estimates agree to the requested relative tolerance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import CascadeSpec, ChannelError
from .specialfn import CdfEvalOptions, DEFAULT_OPTS, cdf_product_rayleigh

MAX_EXACT_HOPS = 4
# exponent excess (above the minimum) beyond which the integrand is treated as zero
EXPONENT_CUTOFF = 40.0
_BOX_MARGIN = 50.0


class QuadratureError(ArithmeticError):
    pass


class CostWarning(UserWarning):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-7
    max_nodes_per_dim: int = 1024
    mapping: str = "critical-point-centered"

    def __post_init__(self):
        if not 0 < self.rel_tol <= 1e-3:
            raise ValueError("rel_tol must lie in (0, 1e-3]")
        if self.max_nodes_per_dim < 16:
            raise ValueError("node budget must be >= 16 per dimension")
        if self.mapping not in ("critical-point-centered", "log-substitution"):
            raise ValueError(f"unknown domain mapping {self.mapping!r}")


DEFAULT_QUAD = QuadratureSpec()


def _prefactor(cascade: CascadeSpec, y: float) -> float:
    return 2.0 ** (cascade.n_hops - 0.5) * math.sqrt(math.pi) * y / cascade.phi


def _trapezoid(cascade: CascadeSpec, y: float, step: float, center: float, lo: float, hi: float,
               s: float):
    """Tensor trapezoid sum over the lattice ``center + k*step`` covering ``[lo, hi]``.

    ``u`` is measured from the critical point; the result is scaled by
    ``exp(h_min)``.
    """
    om = cascade.omegas
    f2 = cascade.f_sq
    n = cascade.n_hops - 1
    y2 = y * y
    k_lo = math.floor((lo - center) / step)
    k_hi = math.ceil((hi - center) / step)
    nodes = center + step * np.arange(k_lo, k_hi + 1)
    m = len(nodes)
    h_min = cascade.n_hops * s
    om_in = om[:-1]
    weight_in = om_in * f2[:-1]
    # the first axis is looped in chunks to bound memory
    if n > 1:
        rest = np.stack(np.meshgrid(*([nodes] * (n - 1)), indexing="ij")).reshape(n - 1, -1)
    else:
        rest = np.zeros((0, 1))
    total = 0.0
    chunk = max(1, 2_000_000 // max(1, rest.shape[1]))
    for start in range(0, m, chunk):
        u0 = nodes[start:start + chunk]
        u = np.concatenate([
            np.broadcast_to(u0[None, :, None], (1, len(u0), rest.shape[1])),
            np.broadcast_to(rest[:, None, :], (n - 1, len(u0), rest.shape[1])),
        ], axis=0).reshape(n, -1)
        x2 = s * om_in[:, None] * np.exp(2.0 * u)
        prod_x2 = np.prod(x2, axis=0)
        excess = y2 / (om[-1] * prod_x2) + np.sum(x2 / om_in[:, None], axis=0) - h_min
        bracket = om[-1] * f2[-1] + y2 / prod_x2 * np.sum(weight_in[:, None] / x2, axis=0)
        vals = np.sqrt(bracket * prod_x2) * np.exp(-excess)
        vals[excess >= EXPONENT_CUTOFF] = 0.0
        total += float(np.sum(vals))
    return total * step**n, m


def exact_lcr(cascade: CascadeSpec, y: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Crossings per second of the cascade amplitude, by quadrature.

    Supported for 2 <= N <= 4 hops; N = 4 emits a :class:`CostWarning`.
    """
    n_hops = cascade.n_hops
    if not 2 <= n_hops <= MAX_EXACT_HOPS:
        raise ChannelError(
            f"exact quadrature supports 2 <= N <= {MAX_EXACT_HOPS} hops, got N = {n_hops}; "
            "use the Laplace approximation or the simulator"
        )
    cascade.require_time_varying()
    y = float(y)
    if not y > 0:
        raise ChannelError("threshold must be > 0")
    if n_hops == MAX_EXACT_HOPS:
        warnings.warn("exact LCR with 4 hops uses a 3-D tensor grid and is slow", CostWarning,
                      stacklevel=2)
    n = n_hops - 1
    s = (y * y / cascade.phi) ** (1.0 / n_hops)
    # with x_i^2 = s Omega_i e^{2u_i} the exponent is s (e^{-2 sum u} + sum e^{2u_i}),
    # minimal at u = 0; the box below contains its level set h - h_min <= margin
    big_u = 0.5 * math.log(n_hops + _BOX_MARGIN / s)
    lo, hi = -n * big_u, big_u
    center = 0.0
    if q.mapping == "log-substitution":
        # nodes anchored at x_i = sqrt(Omega_i) instead of the critical point
        center = -0.5 * math.log(s)
    width = 1.0 / math.sqrt(4.0 * s * n_hops)
    step = min(0.5, width)
    prev = None
    while True:
        val, m = _trapezoid(cascade, y, step, center, lo, hi, s)
        if m > q.max_nodes_per_dim:
            raise QuadratureError(
                f"node budget {q.max_nodes_per_dim} per dimension exceeded before reaching "
                f"rel_tol {q.rel_tol}"
            )
        if prev is not None and abs(val - prev) <= q.rel_tol * abs(val):
            break
        prev = val
        step *= 0.5
    return _prefactor(cascade, y) * math.exp(-n_hops * s) * val


def exact_lcr_dualhop(cascade: CascadeSpec, y: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Two-hop LCR as a single adaptive integral over the first amplitude."""
    if cascade.n_hops != 2:
        raise ChannelError("dual-hop formula needs exactly 2 hops")
    cascade.require_time_varying()
    y = float(y)
    if not y > 0:
        raise ChannelError("threshold must be > 0")
    o1, o2 = cascade.omegas
    f1s, f2s = cascade.f_sq
    y2 = y * y
    x_c = math.sqrt(y) * (o1 / o2) ** 0.25
    h_min = 2.0 * y / math.sqrt(o1 * o2)

    def integrand(x):
        if x <= 0.0:
            return 0.0
        x2 = x * x
        return math.sqrt(o2 * f2s + o1 * f1s * y2 / (x2 * x2)) * math.exp(
            h_min - (y2 / (x2 * o2) + x2 / o1)
        )

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        parts = [
            integrate.quad(integrand, 0.0, x_c, epsabs=0.0, epsrel=q.rel_tol * 1e-2, limit=400),
            integrate.quad(integrand, x_c, np.inf, epsabs=0.0, epsrel=q.rel_tol * 1e-2, limit=400),
        ]
    val = sum(p[0] for p in parts)
    err = sum(p[1] for p in parts)
    if not err <= q.rel_tol * abs(val):
        raise QuadratureError(f"dual-hop quadrature missed rel_tol {q.rel_tol} (error {err:.3g})")
    return 4.0 * math.sqrt(math.pi) * y / (math.sqrt(2.0) * o1 * o2) * math.exp(-h_min) * val


def exact_lcr_curve(cascade: CascadeSpec, ys, q: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    return np.array([exact_lcr(cascade, float(v), q) for v in np.atleast_1d(ys)])


def exact_afd(cascade: CascadeSpec, y: float, q: QuadratureSpec = DEFAULT_QUAD,
              opts: CdfEvalOptions = DEFAULT_OPTS) -> float:
    lcr = exact_lcr(cascade, y, q)
    if lcr <= 0:
        raise ChannelError("crossing rate underflowed to zero; fade duration undefined")
    return cdf_product_rayleigh(y, cascade, opts) / lcr
