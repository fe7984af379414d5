import math

import numpy as np
import pytest

from cascade_lcr.core import CascadeSpec
from cascade_lcr.specialfn import (
    CdfEvalOptions, bessel_k1, cdf_product_rayleigh, dual_product_exp_cdf_closed,
    gamma_upper_zero, product_exp_cdf, product_exp_cdf_recursive,
)

# reference values below were computed with mpmath at 30 digits
# (mp.e1, mp.besselk and mp.meijerg([[1],[]], [[1]*n, [0]], z))
E1_1 = 0.21938393439552027368
E1_01 = 1.8229239584193906159
K1_2 = 0.13986588181652242728
K1_1 = 0.60190723019723457474
CDF2_1 = 0.72026823636695514543
MEIJER = [
    (3, 0.5, 0.65311988205720066743),
    (3, 2.0, 0.87613800717560456227),
    (4, 0.05, 0.36033256196926605318),
    (5, 0.3, 0.70533069061476557062),
    (5, 1.0, 0.84823914213011413136),
]


def test_gamma_upper_zero_values():
    assert gamma_upper_zero(1.0) == pytest.approx(E1_1, rel=1e-13)
    assert gamma_upper_zero(0.1) == pytest.approx(E1_01, rel=1e-13)


@pytest.mark.parametrize("x", [1.5, 5.0, 20.0, 80.0])
def test_gamma_upper_zero_tail_bound(x):
    v = gamma_upper_zero(x)
    assert 0 < v < math.exp(-x) / x


def test_gamma_upper_zero_is_continuous_at_the_branch_switch():
    a, b = gamma_upper_zero(1 - 1e-12), gamma_upper_zero(1 + 1e-12)
    assert a == pytest.approx(b, rel=1e-10)


def test_gamma_upper_zero_domain():
    with pytest.raises(ValueError):
        gamma_upper_zero(0.0)


def test_bessel_k1_values():
    assert bessel_k1(2.0) == pytest.approx(K1_2, rel=1e-12)
    assert bessel_k1(1.0) == pytest.approx(K1_1, rel=1e-12)
    # small-argument behaviour ~ 1/x
    assert bessel_k1(1e-4) * 1e-4 == pytest.approx(1.0, rel=1e-3)


def test_product_exp_cdf_examples():
    assert product_exp_cdf(1.0, 1) == pytest.approx(1 - math.exp(-1), rel=1e-15)
    assert product_exp_cdf(1.0, 2) == pytest.approx(CDF2_1, rel=1e-10)
    for n in (1, 2, 5):
        assert product_exp_cdf(0.0, n) == 0.0


@pytest.mark.parametrize("n,z,ref", MEIJER)
def test_product_exp_cdf_matches_meijer_g(n, z, ref):
    assert product_exp_cdf(z, n) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("z", np.geomspace(1e-4, 10, 25))
def test_closed_forms_n1_n2(z):
    assert product_exp_cdf(z, 1) == pytest.approx(-math.expm1(-z), rel=1e-8)
    assert product_exp_cdf(z, 2) == pytest.approx(dual_product_exp_cdf_closed(z), rel=1e-8)


@pytest.mark.parametrize("n", range(1, 7))
def test_monotone_in_z(n):
    zs = np.geomspace(1e-3, 50, 100)
    v = np.array([product_exp_cdf(z, n) for z in zs])
    assert np.all(np.diff(v) >= 0)
    assert np.all((v >= 0) & (v <= 1))


@pytest.mark.parametrize("n,z", [(2, 0.3), (3, 0.5), (3, 4.0)])
def test_recursive_oracle_agrees(n, z):
    fast = product_exp_cdf(z, n)
    slow = product_exp_cdf_recursive(z, n, CdfEvalOptions(rel_tol=1e-8))
    assert fast == pytest.approx(slow, rel=1e-7)


def test_empirical_product_of_exponentials():
    rng = np.random.default_rng(11)
    for n in (3, 5):
        prod = np.prod(rng.exponential(size=(n, 200_000)), axis=0)
        for q in (0.1, 0.5, 0.9):
            z = np.quantile(prod, q)
            p = product_exp_cdf(z, n)
            se = math.sqrt(p * (1 - p) / prod.size)
            assert abs(np.mean(prod <= z) - p) < 4 * se


def test_cdf_options_validated():
    with pytest.raises(ValueError):
        CdfEvalOptions(rel_tol=0.5)
    with pytest.raises(ValueError):
        CdfEvalOptions(max_depth=0)


def test_cdf_product_rayleigh_examples():
    one = CascadeSpec.simple([2.0])
    assert cdf_product_rayleigh(math.sqrt(2), one) == pytest.approx(1 - math.exp(-1), rel=1e-14)
    assert cdf_product_rayleigh(0.0, one) == 0.0
    two = CascadeSpec.simple([1.0, 1.0])
    assert cdf_product_rayleigh(1.0, two) == pytest.approx(CDF2_1, rel=1e-10)


def test_cdf_product_rayleigh_depends_on_ratio_only():
    a = CascadeSpec.simple([1.0, 2.0, 0.5])
    c = 3.0
    b = CascadeSpec.simple([c**2, 2.0, 0.5])  # Phi scaled by c^2
    ys = np.array([0.1, 0.7, 2.0])
    assert np.allclose(cdf_product_rayleigh(ys, a), cdf_product_rayleigh(c * ys, b), rtol=1e-14)
