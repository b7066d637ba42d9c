"""Test of a fair Bernoulli proportion: ``rho == 1/2`` vs. ``rho ~ Beta(1/2, 1/2)``.

Counts reach 1e8 in practice, so every quantity is computed in log space and
the exact Bayes factor is written in a form where the ``n ln 2`` terms cancel
analytically instead of numerically.
"""

import math

import numpy as np

from .cake_core import make_result
from .errors import DomainError
from .specfun import chi2_sf, log_beta, normal_quantile, xi

__all__ = [
    "binomial_approx",
    "binomial_jeffreys",
    "binomial_lambda",
    "binomial_lrt",
    "binomial_pvalue",
    "binomial_wald_ci",
]

LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2.0 * math.pi)


def _check(s, n):
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    if int(s) != s or not 0 <= s <= n:
        raise DomainError("s must be an integer in [0, n]")


def binomial_lambda(s, n):
    """Exact ``2 ln B(1/2 + s, 1/2 + n - s) - 2 ln pi + 2 n ln 2``, elementwise.

    With ``a = s + 1/2``, ``b = n - s + 1/2`` and ``a + b = n + 1`` the
    log-beta splits into Stirling remainders plus
    ``a ln(2a/(n+1)) + b ln(2b/(n+1)) - ln 2`` after absorbing ``n ln 2``;
    the logs are evaluated with ``log1p`` around 1/2.
    """
    s = np.asarray(s, dtype=float)
    n = np.asarray(n, dtype=float)
    a = s + 0.5
    b = n - s + 0.5
    big = np.minimum(a, b) >= 10.0
    out = np.empty(np.broadcast(a, b).shape)
    a, b, n = np.broadcast_arrays(a, b, n)

    ab, bb, nb = a[big], b[big], n[big]
    c = nb + 1.0
    dev = (ab - bb) / c  # 2a/c - 1
    lb_shifted = (
        np.asarray(xi(ab)) + np.asarray(xi(bb)) - np.asarray(xi(c)) + 0.5 * LOG_2PI
        + ab * np.log1p(dev) + bb * np.log1p(-dev) - math.log(2.0)
    )  # ln B(a, b) + n ln 2
    out[big] = 2.0 * lb_shifted - 2.0 * LOG_PI
    small = ~big
    out[small] = (2.0 * np.asarray(log_beta(a[small], b[small])) - 2.0 * LOG_PI
                  + 2.0 * n[small] * math.log(2.0))
    return float(out) if out.ndim == 0 else out


def binomial_lrt(s, n):
    """LRT statistic for ``rho == 1/2``, with ``0 ln 0 = 0``. Elementwise."""
    s = np.asarray(s, dtype=float)
    n = np.asarray(n, dtype=float)
    f = n - s
    dev = (s - f) / n  # 2 s/n - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        term_s = np.where(s > 0, s * np.log1p(dev), 0.0)
        term_f = np.where(f > 0, f * np.log1p(-dev), 0.0)
    out = 2.0 * (term_s + term_f)
    return float(out) if out.ndim == 0 else out


def binomial_jeffreys(s, n, settings=None):
    """Exact test of ``rho == 1/2`` against the Jeffreys prior on ``rho``."""
    _check(s, n)
    lam = binomial_lambda(s, n)
    if settings is not None:
        lam += settings.delta
    return make_result(lam, binomial_lrt(s, n), 1, n, settings)


def binomial_approx(s, n):
    """Large-n approximation ``lambda_LRT - ln n - ln(pi/2)``."""
    _check(s, n)
    if s in (0, n):
        raise DomainError("the approximation is only valid for 0 < s < n")
    return binomial_lrt(s, n) - math.log(n) - math.log(math.pi / 2.0)


def binomial_pvalue(s, n):
    """LRT p-value ``P(chi2_1 > lambda_LRT)``."""
    _check(s, n)
    if s in (0, n):
        raise DomainError("the p-value needs 0 < s < n")
    return chi2_sf(binomial_lrt(s, n), 1)


def binomial_wald_ci(s, n, level=0.95):
    """Normal-approximation confidence interval for ``rho``."""
    _check(s, n)
    if not 0 < level < 1:
        raise DomainError("level must lie in (0, 1)")
    p = s / n
    half = normal_quantile(0.5 + level / 2.0) * math.sqrt(p * (1.0 - p) / n)
    return p - half, p + half
