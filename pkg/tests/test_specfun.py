import math

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss
from scipy import special

from rmtdensity.exceptions import DomainError
from rmtdensity.services import specfun
from tests.conftest import make_spec


def _gauss_legendre(a: float, b: float, points: int = 400):
    t, w = leggauss(points)
    return 0.5 * (b - a) * t + 0.5 * (b + a), 0.5 * (b - a) * w


class TestLogGamma:
    @pytest.mark.parametrize("x,expected", [(1.0, 0.0), (0.5, 0.5 * math.log(math.pi)), (10.0, math.log(362880.0))])
    def test_examples(self, x, expected):
        assert specfun.log_gamma(x) == pytest.approx(expected, rel=1e-13, abs=1e-15)

    @pytest.mark.parametrize("x", [0.7, 3.3, 150.5, 1e6])
    def test_matches_scipy(self, x):
        assert specfun.log_gamma(x) == pytest.approx(special.gammaln(x), rel=1e-13)

    @pytest.mark.parametrize("x", [0.0, -1.5, math.nan])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            specfun.log_gamma(x)


class TestWavefunctions:
    def test_gue_ground_state(self):
        result = specfun.wavefunctions(make_spec("gue", 1), 0.0)
        assert result.values == [pytest.approx((2 / math.pi) ** 0.25, rel=1e-14)]

    @pytest.mark.parametrize("t", [0.05, 0.3, 1.7])
    def test_lue_ground_state(self, t):
        result = specfun.wavefunctions(make_spec("lue", 1), t)
        assert result.values[0] == pytest.approx(2 * math.exp(-2 * t), rel=1e-14)

    def test_gue_orthonormal(self):
        spec = make_spec("gue", 5)
        x, w = _gauss_legendre(-3.0, 3.0)
        table = specfun.wavefunction_table(spec, x)
        gram = (table * w) @ table.T
        np.testing.assert_allclose(gram, np.eye(5), atol=1e-8)

    @pytest.mark.parametrize("n,alpha", [(8, 0.5), (12, 2.0), (30, 0.0)])
    def test_lue_orthonormal(self, n, alpha):
        spec = make_spec("lue", n, alpha)
        # x = t^2 keeps the integrand smooth at the hard edge
        t, w = _gauss_legendre(0.0, 2.0)
        table = specfun.wavefunction_table(spec, t * t)
        gram = (table * (2 * t * w)) @ table.T
        np.testing.assert_allclose(gram, np.eye(n), atol=1e-8)

    def test_gue_matches_hermite(self):
        n = 6
        spec = make_spec("gue", n)
        x = np.array([-0.8, -0.1, 0.35, 0.9])
        u = math.sqrt(2 * n) * x
        table = specfun.wavefunction_table(spec, x)
        for k in range(n):
            norm = math.sqrt(2.0**k * math.factorial(k) * math.sqrt(math.pi))
            expected = (2 * n) ** 0.25 * special.eval_hermite(k, u) * np.exp(-u * u / 2) / norm
            np.testing.assert_allclose(table[k], expected, rtol=1e-11, atol=1e-12)

    def test_lue_matches_laguerre(self):
        n, alpha = 7, 0.5
        spec = make_spec("lue", n, alpha)
        x = np.array([0.05, 0.3, 0.6, 0.95])
        u = 4 * n * x
        table = specfun.wavefunction_table(spec, x)
        for k in range(n):
            norm = math.exp(0.5 * (special.gammaln(k + 1) - special.gammaln(k + alpha + 1)))
            expected = math.sqrt(4 * n) * norm * u ** (alpha / 2) * np.exp(-u / 2) * special.eval_genlaguerre(k, alpha, u)
            np.testing.assert_allclose(table[k], expected, rtol=1e-10, atol=1e-12)

    def test_gue_parity(self):
        spec = make_spec("gue", 40)
        x = np.linspace(0.05, 1.2, 24)
        plus = specfun.wavefunction_table(spec, x)
        minus = specfun.wavefunction_table(spec, -x)
        signs = (-1.0) ** np.arange(40)
        np.testing.assert_allclose(minus, signs[:, None] * plus, rtol=1e-13)

    @pytest.mark.parametrize("kind,x", [("gue", np.linspace(-0.9, 0.9, 19)), ("lue", np.linspace(0.05, 0.95, 19))])
    def test_large_n_stays_finite(self, kind, x):
        table = specfun.wavefunction_table(make_spec(kind, 1000, 0.5), x)
        assert np.all(np.isfinite(table))
        assert np.max(np.abs(table)) > 0.0

    def test_far_tail_underflows_to_zero(self):
        table = specfun.wavefunction_table(make_spec("gue", 200), np.array([5.0]))
        assert np.all(np.isfinite(table))
        assert np.max(np.abs(table)) == 0.0

    def test_lue_rejects_non_positive(self):
        with pytest.raises(DomainError):
            specfun.wavefunctions(make_spec("lue", 3), 0.0)

    @pytest.mark.parametrize("alpha", [-0.9, -0.3, 0.5])
    def test_lue_table_without_power(self, alpha):
        spec = make_spec("lue", 6, alpha)
        x = np.linspace(0.05, 1.2, 12)
        full = specfun.wavefunction_table(spec, x)
        bare = specfun.wavefunction_table(spec, x, include_power=False)
        np.testing.assert_allclose(bare * (4 * 6 * x) ** (alpha / 2), full, rtol=1e-12)

    def test_lue_table_without_power_is_finite_at_zero(self):
        table = specfun.wavefunction_table(make_spec("lue", 6, -0.9), np.array([0.0]), include_power=False)
        assert np.all(np.isfinite(table))
        assert table[0, 0] > 0.0
        with pytest.raises(DomainError):
            specfun.wavefunction_table(make_spec("lue", 6, -0.9), np.array([-0.1]), include_power=False)


class TestAiry:
    def test_origin(self):
        pair = specfun.airy(0.0)
        assert pair.ai == pytest.approx(3 ** (-2 / 3) / special.gamma(2 / 3), abs=1e-12)
        assert pair.ai_prime == pytest.approx(-(3 ** (-1 / 3)) / special.gamma(1 / 3), abs=1e-12)

    def test_matches_scipy(self):
        xi = np.linspace(-12.0, 10.0, 89)
        ai, ai_prime, _, _ = special.airy(xi)
        for point, expected, expected_prime in zip(xi, ai, ai_prime):
            pair = specfun.airy(point)
            assert pair.ai == pytest.approx(expected, abs=1e-12)
            assert pair.ai_prime == pytest.approx(expected_prime, abs=1e-12)

    @pytest.mark.parametrize("xi", np.concatenate([np.linspace(5.5, 6.5, 11), np.linspace(-12.5, -11.5, 11)]))
    def test_series_and_asymptotic_overlap(self, xi):
        series = specfun.airy_maclaurin(xi)
        asymptotic = specfun.airy_asymptotic(xi)
        assert abs(series.ai - asymptotic.ai) <= 1e-10
        assert abs(series.ai_prime - asymptotic.ai_prime) <= 1e-10

    def test_ode_residual(self):
        h = 1e-4
        for xi in np.linspace(-10.0, 8.0, 37):
            centre = specfun.airy(xi).ai
            second = (specfun.airy(xi + h).ai - 2 * centre + specfun.airy(xi - h).ai) / (h * h)
            assert abs(second - xi * centre) <= 1e-5 * (1 + abs(xi)) * max(abs(centre), 1.0)

    def test_decaying_first_term(self):
        leading = math.exp(-(2 / 3) * 5**1.5) / (2 * math.sqrt(math.pi) * 5**0.25)
        assert specfun.airy(5.0).ai == pytest.approx(leading, rel=0.02)

    def test_oscillatory_two_terms(self):
        x = 4.0
        zeta = (2 / 3) * x**1.5
        phase = zeta - math.pi / 4
        two_terms = (math.cos(phase) + 5 / 72 / zeta * math.sin(phase)) / (math.sqrt(math.pi) * x**0.25)
        assert abs(specfun.airy(-x).ai - two_terms) <= 1e-3

    @pytest.mark.parametrize("xi", [math.nan, math.inf, -math.inf])
    def test_non_finite(self, xi):
        with pytest.raises(DomainError):
            specfun.airy(xi)

    def test_airy_values_vectorized(self):
        ai, ai_prime = specfun.airy_values(np.array([-1.0, 0.0, 1.0]))
        expected_ai, expected_prime, _, _ = special.airy(np.array([-1.0, 0.0, 1.0]))
        np.testing.assert_allclose(ai, expected_ai, atol=1e-13)
        np.testing.assert_allclose(ai_prime, expected_prime, atol=1e-13)
