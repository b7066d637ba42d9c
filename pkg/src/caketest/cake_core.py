"""Cake-prior machinery shared by every concrete test.

A cake prior on a ``d``-dimensional parameter is the normal density
``N(0, g P^{-1})`` with ``P`` the per-observation expected information and
diffuseness ``g = h ** (1 / d)``.  Tying the two hypotheses' ``g`` values to a
single ``h`` this way makes ``d0 ln g0 == d1 ln g1`` so the diffuseness terms
cancel in the Bayes factor, and as ``h -> inf`` the test statistic becomes
the penalized likelihood ratio ``lambda_LRT - nu ln n (+ delta)``.
"""

import enum
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError
from .specfun import chi2_logsf, chi2_quantile, chi2_sf

__all__ = [
    "Decision",
    "Evidence",
    "PriorSettings",
    "TestResult",
    "cake_log_density",
    "decide",
    "delta_to_mimic_lrt",
    "equivalent_alpha",
    "equivalent_log_alpha",
    "g_schedule",
    "interpret",
    "make_result",
    "penalized_lrt",
    "prefers_h1",
]


class Decision(str, enum.Enum):
    PREFER_H0 = "prefer_H0"
    PREFER_H1 = "prefer_H1"


@dataclass(frozen=True)
class PriorSettings:
    """Diffuseness ``h`` (``math.inf`` for the flat limit), offset and prior odds.

    ``delta`` is the arbitrary-constant offset ``ln(D1 / D0)`` added to the
    test statistic; ``prior_odds`` is ``p(H0) / p(H1)``.
    """

    h: float = math.inf
    delta: float = 0.0
    prior_odds: float = 1.0

    def __post_init__(self):
        if not self.h > 0:
            raise DomainError("h must be positive (use math.inf for the limit)")
        if not math.isfinite(self.delta):
            raise DomainError("delta must be finite")
        if not (self.prior_odds > 0 and math.isfinite(self.prior_odds)):
            raise DomainError("prior_odds must be positive and finite")

    @property
    def is_limit(self):
        return math.isinf(self.h)


# Kass & Raftery bands on |lambda_Bayes|.
_BANDS = (
    (2.0, "not worth more than a bare mention"),
    (6.0, "positive"),
    (10.0, "strong"),
    (math.inf, "very strong"),
)


@dataclass(frozen=True)
class Evidence:
    label: str
    favours: str  # "H0" or "H1"


def interpret(lambda_bayes):
    """Strength-of-evidence label for a Bayesian test statistic.

    Negative values get the same bands applied to ``|lambda|`` and favour H0.
    """
    magnitude = abs(lambda_bayes)
    for upper, label in _BANDS:
        if magnitude < upper:
            break
    return Evidence(label=label, favours="H1" if lambda_bayes > 0 else "H0")


@dataclass(frozen=True)
class TestResult:
    """Outcome of one Bayesian hypothesis test.

    ``extras`` holds test-specific diagnostics, e.g. the asymptotic form of the
    two-sample statistic.
    """

    __test__ = False  # keep pytest from collecting this class

    lambda_bayes: float
    lambda_lrt: float
    nu: float
    n: int
    log_bf01: float
    log_posterior_odds_01: float
    decision: Decision
    interpretation: Evidence
    equivalent_alpha: float | None = None
    extras: dict = field(default_factory=dict)

    @property
    def posterior_odds_01(self):
        return math.exp(min(self.log_posterior_odds_01, 709.0))

    @property
    def bf01(self):
        return math.exp(min(self.log_bf01, 709.0))

    def to_dict(self):
        out = asdict(self)
        out["decision"] = self.decision.value
        out["posterior_odds_01"] = self.posterior_odds_01
        return out


def g_schedule(h, d):
    """Diffuseness ``h ** (1 / d)`` for a ``d``-parameter hypothesis."""
    if not h > 0:
        raise DomainError("h must be positive")
    if int(d) != d or d < 1:
        raise DomainError(
            "d must be a positive integer; augment a zero-parameter null with "
            "hypothetical data first"
        )
    return h ** (1.0 / d)


def cake_log_density(theta, precision, g):
    """Log density of the cake prior ``N(0, g * precision^{-1})`` at ``theta``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    precision = np.atleast_2d(np.asarray(precision, dtype=float))
    d = theta.shape[0]
    if precision.shape != (d, d):
        raise DomainError(f"precision has shape {precision.shape}, expected {(d, d)}")
    if not np.allclose(precision, precision.T):
        raise DomainError("precision matrix must be symmetric")
    sign, logdet = np.linalg.slogdet(precision)
    if sign <= 0:
        raise DomainError("precision matrix must be positive definite")
    if not g > 0:
        raise DomainError("g must be positive")
    quad = float(theta @ precision @ theta)
    return -0.5 * d * math.log(2.0 * math.pi * g) + 0.5 * logdet - quad / (2.0 * g)


def penalized_lrt(lambda_lrt, nu, n, settings=None):
    """``lambda_LRT - nu ln n + delta``: the flat-limit cake statistic."""
    if n < 1:
        raise DomainError("n must be at least 1")
    delta = settings.delta if settings is not None else 0.0
    return lambda_lrt - nu * np.log(n) + delta


def equivalent_alpha(nu, n):
    """Level of the LRT whose cut-off is ``nu ln n``: ``P(chi2_nu >= nu ln n)``."""
    if n < 2:
        raise DomainError("n must be at least 2")
    return chi2_sf(nu * math.log(n), nu)


def equivalent_log_alpha(nu, n):
    """:func:`equivalent_alpha` on the log scale."""
    if n < 2:
        raise DomainError("n must be at least 2")
    return chi2_logsf(nu * math.log(n), nu)


def delta_to_mimic_lrt(nu, n, alpha):
    """Offset that turns the Bayesian test into the level-``alpha`` LRT."""
    if n < 2:
        raise DomainError("n must be at least 2")
    return nu * math.log(n) - chi2_quantile(alpha, nu)


def decide(lambda_bayes, settings=None):
    """Decision and log posterior odds for a test statistic.

    H1 is preferred iff the posterior odds ``p(H0|x) / p(H1|x)`` fall below
    one; an exact tie keeps H0.

    Returns
    -------
    (Decision, float)
        The decision and ``ln`` of the posterior odds of H0 to H1.
    """
    odds = settings.prior_odds if settings is not None else 1.0
    log_po = -0.5 * lambda_bayes + math.log(odds)
    decision = Decision.PREFER_H1 if log_po < 0 else Decision.PREFER_H0
    return decision, log_po


def prefers_h1(lambda_bayes, settings=None):
    """Vectorised form of :func:`decide`: boolean array, True where H1 wins."""
    odds = settings.prior_odds if settings is not None else 1.0
    return -0.5 * np.asarray(lambda_bayes) + math.log(odds) < 0


def make_result(lambda_bayes, lambda_lrt, nu, n, settings=None, **extras):
    """Assemble a :class:`TestResult` from the two statistics."""
    lambda_bayes = float(lambda_bayes)
    decision, log_po = decide(lambda_bayes, settings)
    alpha = equivalent_alpha(nu, n) if nu > 0 and n >= 2 else None
    return TestResult(
        lambda_bayes=lambda_bayes,
        lambda_lrt=float(lambda_lrt),
        nu=nu,
        n=int(n),
        log_bf01=-0.5 * lambda_bayes,
        log_posterior_odds_01=log_po,
        decision=decision,
        interpretation=interpret(lambda_bayes),
        equivalent_alpha=alpha,
        extras=dict(extras),
    )
