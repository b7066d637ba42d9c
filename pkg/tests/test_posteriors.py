import math

import numpy as np
import pytest
from scipy import integrate, special

from caketest.errors import DomainError
from caketest.linear_model import linear_posteriors, standardize
from caketest.normal import one_sample_posteriors, two_sample_posteriors
from caketest.posteriors import InverseGamma, LocationScaleT, MultivariateT, PosteriorSet


class TestInverseGamma:
    def test_density_rate_convention(self):
        a, b, x = 3.5, 2.0, 0.7
        expected = a * math.log(b) - special.gammaln(a) - (a + 1) * math.log(x) - b / x
        assert InverseGamma(a, b).log_density(x) == pytest.approx(expected, rel=1e-13)

    def test_moments(self):
        ig = InverseGamma(5.0, 8.0)
        assert ig.mean() == pytest.approx(2.0)
        assert ig.var() == pytest.approx(8.0 ** 2 / (4.0 ** 2 * 3.0))
        assert InverseGamma(1.0, 1.0).mean() == math.inf

    def test_sampling(self):
        ig = InverseGamma(6.0, 10.0)
        draws = ig.sample(np.random.default_rng(0), 100_000)
        assert draws.mean() == pytest.approx(ig.mean(), abs=4 * draws.std() / math.sqrt(draws.size))

    def test_quantile_round_trip(self):
        ig = InverseGamma(2.5, 1.5)
        p = np.array([1e-6, 0.1, 0.5, 0.9, 1 - 1e-6])
        np.testing.assert_allclose(ig.cdf(ig.quantile(p)), p, rtol=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            InverseGamma(0.0, 1.0)
        with pytest.raises(DomainError):
            InverseGamma(2.0, 1.0).quantile(1.0)


class TestLocationScaleT:
    def test_normalised(self):
        t = LocationScaleT(4.0, 1.5, 0.3)
        total, _ = integrate.quad(t.density, -np.inf, np.inf, epsabs=0, epsrel=1e-11)
        assert total == pytest.approx(1.0, rel=1e-9)

    def test_moments(self):
        t = LocationScaleT(10.0, -2.0, 4.0)
        assert t.mean() == -2.0
        assert t.var() == pytest.approx(4.0 * 10 / 8)
        assert math.isnan(LocationScaleT(1.0, 0.0, 1.0).mean())

    def test_sampling(self):
        t = LocationScaleT(8.0, 3.0, 2.0)
        draws = t.sample(np.random.default_rng(1), 200_000)
        assert draws.var() == pytest.approx(t.var(), rel=0.02)


class TestMultivariateT:
    def test_normalised_by_importance_sampling(self):
        shape = np.array([[1.0, 0.3], [0.3, 0.5]])
        mt = MultivariateT(6.0, [1.0, -1.0], shape)
        rng = np.random.default_rng(2)
        m = 200_000
        scale = 4.0
        x = mt.loc + scale * rng.standard_normal((m, 2))
        log_q = -math.log(2 * math.pi * scale ** 2) - ((x - mt.loc) ** 2).sum(1) / (2 * scale ** 2)
        w = np.exp(mt.log_density(x) - log_q)
        assert w.mean() == pytest.approx(1.0, abs=4 * w.std() / math.sqrt(m))

    def test_covariance_by_sampling(self):
        shape = np.array([[2.0, -0.4], [-0.4, 1.0]])
        mt = MultivariateT(9.0, [0.0, 0.0], shape)
        draws = mt.sample(np.random.default_rng(3), 400_000)
        np.testing.assert_allclose(np.cov(draws.T), mt.covariance(), rtol=0.03, atol=0.01)

    def test_invalid(self):
        with pytest.raises(DomainError):
            MultivariateT(5.0, [0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(DomainError):
            MultivariateT(5.0, [0.0], [[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(DomainError):
            MultivariateT(2.0, [0.0], [[1.0]]).covariance()


def _grid_marginals(x, g=1e8):
    """Marginal posteriors of (mu, sigma^2) on a grid under the finite-g
    one-sample H1 prior: mu | s2 ~ N(0, g s2), ln s2 ~ N(0, 2 g)."""
    n = x.size
    xb, v = x.mean(), x.var()
    mu = np.linspace(xb - 12 * math.sqrt(v / n), xb + 12 * math.sqrt(v / n), 1201)
    u = np.linspace(math.log(v) - 5, math.log(v) + 8, 2601)
    M, U = np.meshgrid(mu, u, indexing="ij")
    S = np.exp(U)
    ss = ((x[None, None, :] - M[..., None]) ** 2).sum(-1)
    logp = (-0.5 * n * U - ss / (2 * S) - 0.5 * U - M ** 2 / (2 * g * S) - U ** 2 / (4 * g))
    p = np.exp(logp - logp.max())
    p /= integrate.trapezoid(integrate.trapezoid(p, u, axis=1), mu)
    mu_marg = integrate.trapezoid(p, u, axis=1)
    u_marg = integrate.trapezoid(p, mu, axis=0)
    return mu, mu_marg, u, u_marg


class TestOneSamplePosteriors:
    def test_limit_matches_grid_posterior(self):
        x = np.random.default_rng(4).normal(0.8, 1.3, size=12)
        mu, mu_marg, u, u_marg = _grid_marginals(x)
        post = one_sample_posteriors(x)
        bulk = mu_marg > 1e-3 * mu_marg.max()
        np.testing.assert_allclose(post["H1", "mu"].density(mu)[bulk], mu_marg[bulk], rtol=1e-4)
        # density of ln s2 is the sigma^2 density times s2
        s = np.exp(u)
        bulk = u_marg > 1e-3 * u_marg.max()
        np.testing.assert_allclose(post["H1", "sigma2"].density(s)[bulk] * s[bulk], u_marg[bulk], rtol=1e-4)

    def test_null_sigma2(self):
        x = np.random.default_rng(5).normal(0.2, 1.0, size=15)
        ig = one_sample_posteriors(x, 0.0)["H0", "sigma2"]
        s = np.linspace(0.2, 4.0, 2001)
        n = x.size
        kernel = np.exp(-(n / 2 + 1) * np.log(s) - np.sum(x ** 2) / (2 * s))
        kernel /= integrate.quad(lambda t: t ** (-(n / 2 + 1)) * math.exp(-np.sum(x ** 2) / (2 * t)),
                                 0, np.inf, epsabs=0, epsrel=1e-12)[0]
        np.testing.assert_allclose(ig.density(s), kernel, rtol=1e-9)


class TestTwoSamplePosteriors:
    def test_groups_follow_one_sample_form(self):
        rng = np.random.default_rng(6)
        x0, x1 = rng.normal(size=10), rng.normal(2.0, 3.0, size=14)
        post = two_sample_posteriors(x0, x1)
        g0 = one_sample_posteriors(x0)
        assert post["H1", "mu0"] == g0["H1", "mu"]
        assert post["H1", "sigma0_2"] == g0["H1", "sigma2"]
        both = np.concatenate([x0, x1])
        assert post["H0", "mu"] == one_sample_posteriors(both)["H1", "mu"]
        assert set(post.hypotheses()) == {"H0", "H1"}


class TestLinearPosteriors:
    def test_sigma2_and_alpha(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(40, 2))
        d = standardize(X @ [1.0, 0.0] + rng.normal(size=40), X)
        post = linear_posteriors(d, "10")
        s2 = 1 - (d.X[:, 0] @ d.y) ** 2 / (d.n * d.n)
        assert post["H", "sigma2"].rate == pytest.approx(d.n * s2 / 2)
        assert post["H", "alpha"].scale2 == pytest.approx(s2 / d.n)
        assert post["H", "beta"].df == d.n


class TestPosteriorSet:
    def test_access(self):
        ps = PosteriorSet({"H0": {"a": InverseGamma(2, 1)}, "H1": {"b": LocationScaleT(3, 0, 1)}})
        assert ps["H0", "a"].shape == 2
        assert list(ps["H1"]) == ["b"]
        assert [(h, n) for h, n, _ in ps.items()] == [("H0", "a"), ("H1", "b")]
        assert "H0:a" in repr(ps)
