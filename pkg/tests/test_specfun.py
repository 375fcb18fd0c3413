import math

import mpmath
import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given, settings
from hypothesis import strategies as st

from phavkit import specfun
from phavkit.exceptions import DomainError


def i0_series(x, terms=60):
    return math.fsum((x / 2.0) ** (2 * k) / math.factorial(k) ** 2 for k in range(terms))


def j0_series(x, terms=40):
    return math.fsum((-1) ** k * (x / 2.0) ** (2 * k) / math.factorial(k) ** 2 for k in range(terms))


class TestBesselI0:
    def test_origin(self):
        assert specfun.bessel_i0_scaled(0.0) == 1.0

    def test_value_at_two(self):
        assert specfun.bessel_i0(2.0) == pytest.approx(i0_series(2.0), rel=1e-14)
        assert specfun.bessel_i0(2.0) == pytest.approx(2.2795853023360673, rel=1e-14)

    def test_large_argument_scaled_is_finite(self):
        v = specfun.bessel_i0_scaled(700.0)
        assert math.isfinite(v) and 0.0 < v < 1.0

    def test_against_scipy_across_crossover(self):
        x = np.concatenate([np.linspace(0, 19.9, 200), np.linspace(20.0, 800.0, 300)])
        got = specfun.bessel_i0_scaled(x)
        np.testing.assert_allclose(got, sc.i0e(x), rtol=1e-13)

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            specfun.bessel_i0_scaled(-1.0)
        with pytest.raises(DomainError):
            specfun.bessel_i0_scaled(float("nan"))


class TestBesselJ0:
    def test_origin(self):
        assert specfun.bessel_j0(0.0) == 1.0

    def test_first_zero(self):
        assert abs(specfun.bessel_j0(2.404825557695773)) < 1e-10

    def test_value_at_one(self):
        assert specfun.bessel_j0(1.0) == pytest.approx(j0_series(1.0), abs=1e-15)

    def test_against_scipy_all_bands(self):
        x = np.linspace(0.0, 200.0, 4001)
        np.testing.assert_allclose(specfun.bessel_j0(x), sc.j0(x), atol=1e-13)

    def test_scalar_in_scalar_out(self):
        assert isinstance(specfun.bessel_j0(3.0), float)


class TestPolynomials:
    def test_laguerre_examples(self):
        assert specfun.laguerre(0, 7.3) == 1.0
        assert specfun.laguerre(1, 2.0) == -1.0
        assert specfun.laguerre(2, 1.0) == pytest.approx(-0.5)

    @given(st.integers(0, 60), st.floats(0.0, 50.0))
    @settings(max_examples=60, deadline=None)
    def test_laguerre_matches_scipy(self, n, x):
        ref = sc.eval_laguerre(n, x)
        assert specfun.laguerre(n, x) == pytest.approx(ref, rel=1e-9, abs=1e-9 * max(1.0, abs(ref)))

    def test_laguerre_table_rows(self):
        x = np.array([0.3, 2.0, 9.0])
        table = specfun.laguerre_table(12, x)
        for n in range(13):
            np.testing.assert_allclose(table[n], sc.eval_laguerre(n, x), rtol=1e-12, atol=1e-12)

    def test_legendre_examples(self):
        for k in range(51):
            assert specfun.legendre(k, 1.0) == pytest.approx(1.0)
        assert specfun.legendre(2, 0.5) == pytest.approx(-0.125)
        assert specfun.legendre_scaled(2, 0.0) == pytest.approx(1.5)

    @given(st.integers(0, 20), st.floats(0.01, 1.0))
    @settings(max_examples=60, deadline=None)
    def test_legendre_scaled_definition(self, k, u):
        ref = u**k * sc.eval_legendre(k, 1.0 / u)
        assert specfun.legendre_scaled(k, u) == pytest.approx(ref, rel=1e-10)

    def test_legendre_scaled_at_zero_is_double_factorial_ratio(self):
        for k in range(15):
            assert specfun.legendre_scaled(k, 0.0) == pytest.approx(
                specfun.double_factorial_odd(k) / math.factorial(k), rel=1e-14
            )


class TestHypergeometric:
    def test_origin(self):
        assert specfun.hyp1f1_half(0, 0.0) == 1.0

    def test_bessel_identity(self):
        assert specfun.hyp1f1_half(0, 2.0) == pytest.approx(math.e * specfun.bessel_i0(1.0), rel=1e-14)

    def test_extended_precision_oracle(self):
        mpmath.mp.dps = 60
        ref = float(mpmath.hyp1f1(mpmath.mpf(1) / 2, 4, 4))
        assert specfun.hyp1f1_half(3, 4.0) == pytest.approx(ref, rel=1e-14)

    @given(st.integers(0, 40), st.floats(0.0, 300.0))
    @settings(max_examples=50, deadline=None)
    def test_scaled_matches_mpmath(self, n, z):
        mpmath.mp.dps = 40
        ref = float(mpmath.exp(-z) * mpmath.hyp1f1(0.5, n + 1, z))
        assert specfun.hyp1f1_half_scaled(n, z) == pytest.approx(ref, rel=1e-12)

    def test_large_z_scaled_finite(self):
        assert math.isfinite(specfun.hyp1f1_half_scaled(0, 5000.0))

    def test_rejects_bad_input(self):
        with pytest.raises(DomainError):
            specfun.hyp1f1_half(-1, 1.0)
        with pytest.raises(DomainError):
            specfun.hyp1f1_half(0, -1.0)


class TestDoubleFactorial:
    def test_examples(self):
        assert specfun.double_factorial_odd(0) == 1
        assert specfun.double_factorial_odd(2) == 3
        assert specfun.double_factorial_odd(4) == 105

    def test_log_matches_product(self):
        for k in (1, 10, 50, 100):
            assert specfun.log_double_factorial_odd(k) == pytest.approx(
                math.log(specfun.double_factorial_odd(k)), rel=1e-13
            )

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            specfun.double_factorial_odd(-1)
