"""Special functions against frozen 40-50 digit mpmath values."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from caketest.errors import DomainError
from caketest.specfun import (
    chi2_logsf,
    chi2_quantile,
    chi2_sf,
    log_beta,
    log_gamma,
    normal_cdf,
    normal_quantile,
    xi,
)

# mpmath: loggamma(x) + x - x log x - log(2 pi) / 2
XI_ORACLE = [
    (0.5, 0.5),
    (3.0, -0.52162821864905650655),
    (9.99, -1.142453399532496745),
    (10.0, -1.1429619830636599708),
    (10.01, -1.1434700499609884433),
    (50.0, -1.9543448582670896638),
    (1000.0, -3.4537943061605129697),
    (1e6, -6.9077551956488037187),
    (1e10, -11.512925464961895087),
]

# mpmath: log(beta(a, b))
LOG_BETA_ORACLE = [
    (0.5, 0.5, 1.1447298858494001741),
    (3.0, 4.5, -4.3874804853563454252),
    (12.0, 15.0, -18.568172732389434645),
    (1000.0, 2000.5, -1912.0773676018385262),
    (52263470.5, 52226530.5, -72426950.680433698196),
    (1e9, 1e9, -1386294370.2160114137),
]

# mpmath: gammainc(nu/2, x/2, inf, regularized=True) and its log
CHI2_ORACLE = [
    (3.841458820694124, 1, 0.050000000000000057435, -2.9957322735539898447),
    (10.0, 2, 0.0067379469990854670966, -5.0),
    (0.5, 3, 0.91889141165467585936, -0.084587322851899340806),
    (50.0, 4, 3.6108654048906453546e-10, -21.741903461978517955),
    (200.0, 1, 2.088487583762544757e-45, -102.87988902484488857),
    (1500.0, 1, 0.0, -753.88306710538242928),
    (3000.0, 5, 0.0, -1489.3138524566149952),
    (20000.0, 10, 0.0, -9966.3362923024458829),
]

# bisection on the mpmath upper tail
QUANTILE_ORACLE = [
    (0.05, 1, 3.8414588206941258653),
    (0.01, 2, 9.2103403719761826944),
    (1e-4, 3, 21.107513466160213574),
    (0.5, 4, 3.3566939800333213068),
    (1e-10, 1, 41.821456364761294135),
    (0.999, 2, 0.0020010006671670687784),
]


class TestLogGamma:
    def test_large_argument(self):
        # mpmath loggamma(52263470.5)
        assert log_gamma(52263470.5) == pytest.approx(876552896.38989177510, rel=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            log_gamma(0.0)
        with pytest.raises(DomainError):
            log_gamma(-1.5)

    def test_array(self):
        x = np.array([0.5, 1.0, 2.0, 10.0])
        np.testing.assert_allclose(log_gamma(x), special.gammaln(x), rtol=1e-15)


class TestXi:
    @pytest.mark.parametrize("x, expected", XI_ORACLE)
    def test_oracle(self, x, expected):
        assert xi(x) == pytest.approx(expected, rel=1e-13, abs=1e-15)

    def test_continuous_across_series_switch(self):
        below, above = xi(np.nextafter(10.0, 0.0)), xi(10.0)
        assert abs(below - above) < 1e-13

    def test_asymptote(self):
        # xi(x) ~ -ln(x)/2 + 1/(12x)
        x = np.array([1e3, 1e5, 1e8])
        np.testing.assert_allclose(xi(x), -0.5 * np.log(x) + 1 / (12 * x), rtol=1e-9)

    def test_scalar_in_scalar_out(self):
        assert isinstance(xi(20.0), float)
        assert xi(np.array([20.0, 30.0])).shape == (2,)


class TestLogBeta:
    @pytest.mark.parametrize("a, b, expected", LOG_BETA_ORACLE)
    def test_oracle(self, a, b, expected):
        assert log_beta(a, b) == pytest.approx(expected, rel=1e-14)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.1, 1e7), st.floats(0.1, 1e7))
    def test_symmetric(self, a, b):
        assert log_beta(a, b) == pytest.approx(log_beta(b, a), rel=1e-13, abs=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.5, 1e4), st.floats(0.5, 1e4))
    def test_recurrence(self, a, b):
        # B(a + 1, b) = B(a, b) * a / (a + b)
        lhs = log_beta(a + 1.0, b)
        rhs = log_beta(a, b) + math.log(a) - math.log(a + b)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            log_beta(0.0, 1.0)


class TestChi2:
    @pytest.mark.parametrize("x, nu, sf, logsf", CHI2_ORACLE)
    def test_sf(self, x, nu, sf, logsf):
        assert chi2_sf(x, nu) == pytest.approx(sf, rel=1e-12, abs=1e-300)

    @pytest.mark.parametrize("x, nu, sf, logsf", CHI2_ORACLE)
    def test_logsf(self, x, nu, sf, logsf):
        assert chi2_logsf(x, nu) == pytest.approx(logsf, rel=1e-12)

    def test_logsf_vectorised_across_branch(self):
        x = np.array([1.0, 200.0, 3000.0])
        out = chi2_logsf(x, 5)
        assert out.shape == (3,)
        assert out[2] == pytest.approx(-1489.3138524566149952, rel=1e-12)
        assert out[0] == pytest.approx(math.log(chi2_sf(1.0, 5)), rel=1e-14)

    def test_nu2_closed_form(self):
        x = np.linspace(0, 40, 81)
        np.testing.assert_allclose(chi2_sf(x, 2), np.exp(-x / 2), rtol=1e-14)

    @pytest.mark.parametrize("alpha, nu, expected", QUANTILE_ORACLE)
    def test_quantile_oracle(self, alpha, nu, expected):
        assert chi2_quantile(alpha, nu) == pytest.approx(expected, rel=1e-11)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e-12, 1 - 1e-8), st.integers(1, 30))
    def test_round_trip(self, alpha, nu):
        assert chi2_sf(chi2_quantile(alpha, nu), nu) == pytest.approx(alpha, rel=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            chi2_sf(-1.0, 1)
        with pytest.raises(DomainError):
            chi2_sf(1.0, 0)
        for alpha in (0.0, 1.0, 1.5):
            with pytest.raises(DomainError):
                chi2_quantile(alpha, 2)

    @pytest.mark.parametrize("alpha", [0.1, 0.01, 1e-4])
    @pytest.mark.parametrize("nu", range(2, 11))
    def test_quantile_bounds(self, alpha, nu):
        # Laurent-Massart style bounds, lower bound valid for alpha <= 0.17
        q = chi2_quantile(alpha, nu)
        la = math.log(1 / alpha)
        assert nu + 2 * la - 2.5 <= q <= nu + 2 * la + 2 * math.sqrt(nu * la)


class TestNormal:
    def test_values(self):
        assert normal_cdf(0.0) == 0.5
        assert normal_cdf(1.959963984540054) == pytest.approx(0.975, rel=1e-14)
        assert normal_quantile(0.975) == pytest.approx(1.959963984540054, rel=1e-14)

    def test_round_trip(self):
        p = np.linspace(1e-6, 1 - 1e-6, 101)
        np.testing.assert_allclose(normal_cdf(normal_quantile(p)), p, rtol=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            normal_quantile(1.0)
