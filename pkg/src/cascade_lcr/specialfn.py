"""Special functions behind the analytic formulas.

The N*Rayleigh CDF is a Meijer G-function of ``y**2 / phi``.  The only
G-function needed here is ``G^{n,1}_{1,n+1}[z | 1; 1,...,1, 0]``, which is the
CDF at ``z`` of a product of ``n`` independent unit-mean exponential
variables.  Its Mellin-Barnes integrand reduces to ``Gamma(1-s)**n z**s / s``,
so it is evaluated on a straight contour placed at the real saddle point of
the integrand magnitude.  Contours right of the pole at ``s = 0`` give the
CDF; contours left of it give the complementary CDF, and the better
conditioned of the two is used.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from scipy.special import loggamma

EULER_GAMMA = 0.57721566490153286061


class SpecialFunctionError(ValueError):
    pass


class ConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class CdfEvalOptions:
    rel_tol: float = 1e-9
    max_depth: int = 200

    def __post_init__(self):
        if not 0 < self.rel_tol <= 1e-2:
            raise SpecialFunctionError("rel_tol must lie in (0, 1e-2]")
        if self.max_depth < 1:
            raise SpecialFunctionError("max_depth must be >= 1")


DEFAULT_OPTS = CdfEvalOptions()


# --------------------------------------------------------------------------
# Gamma(0, x) = E1(x)
# --------------------------------------------------------------------------


def gamma_upper_zero(x: float) -> float:
    """Upper incomplete gamma function of order zero, ``Gamma(0, x) = E1(x)``.

    Power series below 1, modified-Lentz continued fraction above.
    """
    x = float(x)
    if not x > 0:
        raise SpecialFunctionError(f"Gamma(0, x) needs x > 0, got {x}")
    if x < 1.0:
        total = 0.0
        term = 1.0
        k = 1
        while True:
            term *= -x / k
            inc = term / k
            total += inc
            if abs(inc) < 1e-17 * abs(total) or k > 200:
                break
            k += 1
        return -EULER_GAMMA - math.log(x) - total

    # E1(x) = exp(-x) / (x + 1 - 1^2/(x + 3 - 2^2/(x + 5 - ...)))
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:  # pragma: no cover - converges in < 100 steps for x >= 1
        raise ConvergenceError(f"continued fraction for E1({x}) did not converge")
    return h * math.exp(-x)


# --------------------------------------------------------------------------
# CDF of a product of unit-mean exponentials
# --------------------------------------------------------------------------


def _log_magnitude(c: float, n: int, log_z: float) -> float:
    return n * loggamma(1.0 - c).real + c * log_z - math.log(abs(c))


def _saddle(n: int, log_z: float, lo: float, hi: float):
    res = optimize.minimize_scalar(
        _log_magnitude, bounds=(lo, hi), args=(n, log_z), method="bounded",
        options={"xatol": 1e-10},
    )
    return float(res.x), float(res.fun)


def product_exp_cdf(z: float, n: int, opts: CdfEvalOptions = DEFAULT_OPTS) -> float:
    """``P(E_1 * ... * E_n <= z)`` for independent unit-mean exponentials.

    Equal to ``G^{n,1}_{1,n+1}[z | 1; 1,...,1, 0]``.
    """
    z = float(z)
    if not z >= 0 or not isinstance(n, (int, np.integer)) or n < 1:
        raise SpecialFunctionError(f"need z >= 0 and integer n >= 1, got z={z}, n={n}")
    if z == 0.0:
        return 0.0
    if math.isinf(z):
        return 1.0
    if n == 1:
        return -math.expm1(-z)

    log_z = math.log(z)
    c_lo, m_lo = _saddle(n, log_z, 1e-12, 1.0 - 1e-12)
    c_hi, m_hi = _saddle(n, log_z, -80.0, -1e-12)
    lower = m_lo <= m_hi
    c, m0 = (c_lo, m_lo) if lower else (c_hi, m_hi)
    if m0 < -740.0:
        # the target tail probability underflows
        return 0.0 if lower else 1.0

    def integrand(w):
        s = complex(c, w)
        return (np.exp(n * loggamma(1.0 - s) + s * log_z - m0) / s).real

    epsrel = max(opts.rel_tol * 1e-2, 1e-13)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=epsrel,
                                  limit=opts.max_depth)
    if not np.isfinite(val) or err > opts.rel_tol * abs(val) + 1e-300:
        raise ConvergenceError(
            f"product_exp_cdf(z={z}, n={n}) missed rel_tol={opts.rel_tol} "
            f"(error estimate {err:.3g} on {val:.3g})"
        )
    tail = val * math.exp(m0) / math.pi
    if lower:
        return min(max(tail, 0.0), 1.0)
    return min(max(1.0 + tail, 0.0), 1.0)


def product_exp_cdf_recursive(z: float, n: int, opts: CdfEvalOptions = DEFAULT_OPTS) -> float:
    """Same CDF by the nested recursion ``F_n(z) = int F_{n-1}(z/t) e^{-t} dt``.

    Cost grows geometrically with ``n``; kept as an independent route for
    small ``n``.
    """
    z = float(z)
    if not z >= 0 or n < 1:
        raise SpecialFunctionError(f"need z >= 0 and n >= 1, got z={z}, n={n}")
    if z == 0.0:
        return 0.0
    if n == 1:
        return -math.expm1(-z)
    t_max = -math.log(opts.rel_tol * 1e-2)

    # t = exp(v): F_n(z) = int F_{n-1}(z e^{-v}) exp(v - e^v) dv
    def integrand(v):
        return product_exp_cdf_recursive(z * math.exp(-v), n - 1, opts) * math.exp(v - math.exp(v))

    v_lo = math.log(opts.rel_tol * 1e-2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(integrand, v_lo, math.log(t_max), epsabs=0.0,
                                  epsrel=opts.rel_tol, limit=opts.max_depth,
                                  points=[min(max(math.log(z), v_lo + 1), math.log(t_max) - 1)])
    if err > 10 * opts.rel_tol * abs(val) + 1e-300:
        raise ConvergenceError(f"recursive CDF at z={z}, n={n} did not converge")
    # mass below v_lo contributes at most e^{v_lo}; above t_max at most e^{-t_max}
    return val


def cdf_product_rayleigh(y, cascade, opts: CdfEvalOptions = DEFAULT_OPTS):
    """CDF of the cascade amplitude; depends on ``y`` only through ``y**2/phi``."""
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr < 0):
        raise SpecialFunctionError("thresholds must be >= 0")
    n = cascade.n_hops
    ph = cascade.phi
    out = np.array([product_exp_cdf(v * v / ph, n, opts) for v in y_arr.ravel()])
    out = out.reshape(y_arr.shape)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Oracles
# --------------------------------------------------------------------------


def bessel_k1(x: float) -> float:
    """Modified Bessel function K_1 from ``int_0^inf exp(-x cosh t) cosh t dt``."""
    x = float(x)
    if not x > 0:
        raise SpecialFunctionError(f"K1(x) needs x > 0, got {x}")
    # scaled by exp(x) so large arguments do not underflow inside the quadrature
    t_end = math.acosh(1.0 + 800.0 / x)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(
            lambda t: math.exp(-x * (math.cosh(t) - 1.0)) * math.cosh(t),
            0.0, t_end, epsabs=0.0, epsrel=1e-13, limit=400,
        )
    return val * math.exp(-x)


def dual_product_exp_cdf_closed(z: float) -> float:
    """``1 - 2 sqrt(z) K1(2 sqrt(z))``: product of two unit exponentials."""
    if z == 0:
        return 0.0
    r = 2.0 * math.sqrt(z)
    return 1.0 - r * bessel_k1(r)
