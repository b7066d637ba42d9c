"""Normal-family tests: one-sample and two-sample mean tests with unknown
variance, the known-variance z-test (null augmented with hypothetical data),
and Lindley's conjugate-normal Bayes factor.

All variance estimates are MLEs (divisor ``n``).
"""

import math

import numpy as np

from .cake_core import PriorSettings, make_result, penalized_lrt
from .errors import DegenerateSample, DomainError
from .posteriors import InverseGamma, LocationScaleT, PosteriorSet
from .quadrature import integrate_log_over_positive_halfline
from .specfun import xi

__all__ = [
    "lindley_bf",
    "one_sample",
    "one_sample_equal_g",
    "one_sample_finite_h",
    "one_sample_limit",
    "one_sample_log_marginals",
    "one_sample_lrt",
    "one_sample_posteriors",
    "two_sample",
    "two_sample_posteriors",
    "two_sample_statistics",
    "z_augmented_log_marginals",
    "z_test_augmented",
]

LOG_2PI = math.log(2.0 * math.pi)


def _sample(x, name="x"):
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 2:
        raise DomainError(f"{name} needs at least two observations")
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name} contains non-finite values")
    return x


def _mle_var(x, name="sample"):
    v = float(np.mean((x - x.mean()) ** 2))
    if not v > 0:
        raise DegenerateSample(f"{name} has zero variance")
    return v


def _settings(settings):
    return settings if settings is not None else PriorSettings()


# ---------------------------------------------------------------------------
# One-sample test, unknown variance
# ---------------------------------------------------------------------------


def one_sample_lrt(n, xbar, var1, mu0=0.0):
    """LRT statistic ``n ln(var0 / var1)`` from sufficient statistics.

    ``var1`` is the MLE variance about the sample mean; the null MLE variance
    is ``var1 + (xbar - mu0)**2``.  Works elementwise on arrays.
    """
    return n * np.log1p((np.asarray(xbar) - mu0) ** 2 / var1)


def one_sample_limit(x, mu0=0.0, settings=None):
    """Flat-limit one-sample test: ``lambda_Bayes = lambda_LRT - ln n``."""
    settings = _settings(settings)
    x = _sample(x)
    n = x.size
    var1 = _mle_var(x)
    lam_lrt = float(one_sample_lrt(n, x.mean(), var1, mu0))
    return make_result(penalized_lrt(lam_lrt, 1, n, settings), lam_lrt, 1, n, settings)


def one_sample_log_marginals(x, mu0, g0, g1, rel_tol=1e-10):
    """Log marginal likelihoods ``(ln p(x|H0), ln p(x|H1))`` at fixed ``g0, g1``.

    Under H0 ``sigma^2 ~ LN(0, 2 g0)``; under H1 ``sigma^2 ~ LN(0, 2 g1)``
    and ``mu | sigma^2 ~ N(mu0, g1 sigma^2)``.  The remaining one-dimensional
    integral over ``sigma^2`` is done numerically.
    """
    x = _sample(x) - mu0
    n = x.size
    ss0 = float(np.sum(x ** 2))
    ss1 = float(np.sum((x - x.mean()) ** 2))
    # ||x||^2 - (n xbar)^2 / (n + 1/g1), written to avoid cancellation.
    ss_g = ss1 + n * x.mean() ** 2 / (n * g1 + 1.0)
    base = -0.5 * n * LOG_2PI
    power = -(n + 2) / 2.0

    def log_h0(s):
        ls = math.log(s)
        return power * ls - ss0 / (2.0 * s) - ls * ls / (4.0 * g0)

    def log_h1(s):
        ls = math.log(s)
        return power * ls - ss_g / (2.0 * s) - ls * ls / (4.0 * g1)

    const0 = base - 0.5 * math.log(4.0 * math.pi * g0)
    const1 = (base - 0.5 * math.log(4.0 * math.pi * g1 * g1)
              - 0.5 * math.log(n + 1.0 / g1))
    m0 = integrate_log_over_positive_halfline(log_h0, rel_tol).log_value + const0
    m1 = integrate_log_over_positive_halfline(log_h1, rel_tol).log_value + const1
    return m0, m1


def one_sample_finite_h(x, mu0, h, rel_tol=1e-10):
    """``ln BF01(h)`` under the cake schedule ``g0 = h``, ``g1 = sqrt(h)``."""
    if not (h > 0 and math.isfinite(h)):
        raise DomainError("h must be positive and finite")
    m0, m1 = one_sample_log_marginals(x, mu0, h, math.sqrt(h), rel_tol)
    return m0 - m1


def one_sample_equal_g(x, mu0, g, rel_tol=1e-10):
    """``ln BF01`` with the same diffuseness ``g`` under both hypotheses.

    Diagnostic only: this grows like ``ln(g) / 2`` as ``g`` increases,
    favouring H0 whatever the data say.
    """
    if not (g > 0 and math.isfinite(g)):
        raise DomainError("g must be positive and finite")
    m0, m1 = one_sample_log_marginals(x, mu0, g, g, rel_tol)
    return m0 - m1


def one_sample(x, mu0=0.0, settings=None):
    """One-sample test using the finite-h Bayes factor or its limit as ``settings.h`` dictates."""
    settings = _settings(settings)
    if settings.is_limit:
        return one_sample_limit(x, mu0, settings)
    x = _sample(x)
    n = x.size
    lam_lrt = float(one_sample_lrt(n, x.mean(), _mle_var(x), mu0))
    log_bf = one_sample_finite_h(x, mu0, settings.h)
    return make_result(-2.0 * log_bf + settings.delta, lam_lrt, 1, n, settings, h=settings.h)


def one_sample_posteriors(x, mu0=0.0):
    """Flat-limit posteriors for the one-sample test."""
    x = _sample(x)
    n = x.size
    var1 = _mle_var(x)
    var0 = float(np.mean((x - mu0) ** 2))
    return PosteriorSet({
        "H0": {"sigma2": InverseGamma(n / 2.0, n * var0 / 2.0)},
        "H1": {
            "mu": LocationScaleT(n, float(x.mean()), var1 / n),
            "sigma2": InverseGamma(n / 2.0, n * var1 / 2.0),
        },
    })


# ---------------------------------------------------------------------------
# Two-sample test (equal mean and variance vs. separate means and variances)
# ---------------------------------------------------------------------------


def two_sample_statistics(n0, n1, var_pooled, var0, var1):
    """Return ``(lambda_LRT, exact lambda_Bayes, asymptotic lambda_Bayes)``.

    The exact form keeps every Stirling remainder; the asymptotic one is
    ``lambda_LRT - 2 ln n``.  Neither includes ``delta``.  Elementwise on arrays.
    """
    n = n0 + n1
    lam_lrt = n * np.log(var_pooled) - n0 * np.log(var0) - n1 * np.log(var1)
    exact = (
        lam_lrt - 3.0 * np.log(n)
        - 2.0 * np.asarray(xi(n / 2.0)) + 2.0 * np.asarray(xi(n0 / 2.0))
        + 2.0 * np.asarray(xi(n1 / 2.0))
        + np.log(n0 * n1 / 2.0)
    )
    return lam_lrt, exact, lam_lrt - 2.0 * np.log(n)


def two_sample(x0, x1, settings=None):
    """Two-sample test: H0 one normal population, H1 two with their own mean and variance.

    The decision uses the exact statistic; the asymptotic ``lambda_LRT - 2 ln n``
    is reported in ``extras["lambda_bayes_asymptotic"]``.
    """
    settings = _settings(settings)
    if not settings.is_limit:
        raise DomainError("the two-sample test is only available in the h -> inf limit")
    x0 = _sample(x0, "x0")
    x1 = _sample(x1, "x1")
    pooled = np.concatenate([x0, x1])
    v0, v1 = _mle_var(x0, "group 0"), _mle_var(x1, "group 1")
    v = _mle_var(pooled, "pooled sample")
    lam_lrt, exact, asym = two_sample_statistics(x0.size, x1.size, v, v0, v1)
    return make_result(
        float(exact) + settings.delta, lam_lrt, 2, pooled.size, settings,
        lambda_bayes_asymptotic=float(asym) + settings.delta,
        n0=x0.size, n1=x1.size,
    )


def two_sample_posteriors(x0, x1):
    x0 = _sample(x0, "x0")
    x1 = _sample(x1, "x1")
    pooled = np.concatenate([x0, x1])
    n, n0, n1 = pooled.size, x0.size, x1.size
    v = _mle_var(pooled, "pooled sample")
    v0, v1 = _mle_var(x0, "group 0"), _mle_var(x1, "group 1")
    return PosteriorSet({
        "H0": {
            "mu": LocationScaleT(n, float(pooled.mean()), v / n),
            "sigma2": InverseGamma(n / 2.0, n * v / 2.0),
        },
        "H1": {
            "mu0": LocationScaleT(n0, float(x0.mean()), v0 / n0),
            "sigma0_2": InverseGamma(n0 / 2.0, n0 * v0 / 2.0),
            "mu1": LocationScaleT(n1, float(x1.mean()), v1 / n1),
            "sigma1_2": InverseGamma(n1 / 2.0, n1 * v1 / 2.0),
        },
    })


# ---------------------------------------------------------------------------
# Known-variance z-test via hypothetical data
# ---------------------------------------------------------------------------


def z_augmented_log_marginals(x, mu0, sigma2, h, z):
    """The four log marginals ``(x|H0, z|H0, x|H1, z|H1)`` of the augmented problem.

    The hypothetical sample ``z`` shares a nuisance mean across hypotheses;
    its prior diffuseness is ``h`` under H0 and ``sqrt(h)`` under H1 while
    ``mu`` (H1 only, centred at ``mu0``) gets ``sqrt(h)``.
    """
    x = _sample(x)
    z = _sample(z, "z")
    if not sigma2 > 0:
        raise DomainError("sigma2 must be positive")
    g0, g1 = h, math.sqrt(h)

    def shrunk(v, g):
        m = v.size
        ss = float(np.sum((v - v.mean()) ** 2))
        resid = ss + m * v.mean() ** 2 / (m * g + 1.0)
        return (-0.5 * m * math.log(2.0 * math.pi * sigma2) - resid / (2.0 * sigma2)
                - 0.5 * math.log(g) - 0.5 * math.log(m + 1.0 / g))

    n = x.size
    lx0 = -0.5 * n * math.log(2.0 * math.pi * sigma2) - float(np.sum((x - mu0) ** 2)) / (2.0 * sigma2)
    return lx0, shrunk(z, g0), shrunk(x - mu0, g1), shrunk(z, g1)


def z_test_augmented(x, mu0, sigma2, h=None, settings=None, zbar=0.0):
    """Known-variance test of ``mu == mu0``.

    In the limit ``lambda_Bayes = lambda_LRT - ln n`` with
    ``lambda_LRT = n (xbar - mu0)**2 / sigma2``.  For finite ``h`` the four
    closed-form marginals are combined; the hypothetical sample enters only
    through its mean, fixed at ``zbar`` (its sum of squares cancels).
    """
    settings = _settings(settings)
    if h is None:
        h = settings.h
    x = _sample(x)
    if not sigma2 > 0:
        raise DomainError("sigma2 must be positive")
    n = x.size
    lam_lrt = n * (x.mean() - mu0) ** 2 / sigma2
    if math.isinf(h):
        return make_result(penalized_lrt(lam_lrt, 1, n, settings), lam_lrt, 1, n, settings)
    if not h > 0:
        raise DomainError("h must be positive")
    z = np.full(n, float(zbar))
    z[0] += 1.0  # any spread works; only the mean matters
    z[1] -= 1.0
    lx0, lz0, lx1, lz1 = z_augmented_log_marginals(x, mu0, sigma2, h, z)
    lam = -2.0 * ((lx0 + lz0) - (lx1 + lz1)) + settings.delta
    return make_result(lam, lam_lrt, 1, n, settings, h=h)


# ---------------------------------------------------------------------------
# Lindley's example
# ---------------------------------------------------------------------------


def lindley_bf(xbar, n, mu0, sigma2, tau2):
    """Bayes factor for ``mu == mu0`` (known ``sigma2``) against ``mu ~ N(mu0, tau2)``.

    Returns
    -------
    (float, float)
        ``BF01`` and ``lambda_Bayes = -2 ln BF01``.
    """
    if not (sigma2 > 0 and tau2 > 0):
        raise DomainError("sigma2 and tau2 must be positive")
    if n < 1:
        raise DomainError("n must be positive")
    z2 = n * (xbar - mu0) ** 2 / sigma2
    lam = n * z2 / (n + sigma2 / tau2) - math.log1p(n * tau2 / sigma2)
    return math.exp(-0.5 * lam), lam
