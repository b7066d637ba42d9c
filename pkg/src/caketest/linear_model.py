"""Linear-model tests and selection under cake priors.

Data are standardized first (``ybar = 0``, ``||y||^2 = n``, every covariate
column centred with ``||X_j||^2 = n``), which makes ``1 - R^2`` equal to the
MLE residual variance and makes every statistic free of measurement units.
Under cake priors on the intercept and the selected coefficients (Jeffreys
prior on ``sigma^2``), ``-2 ln BF01`` tends to the BIC difference as
``h -> inf``.

Reported BIC values are on the standardized scale.  Raw-scale BIC differs by a
constant common to all models, so rankings and differences are unaffected.
"""

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .cake_core import make_result, penalized_lrt
from .errors import (
    ConstantColumn,
    ConstantResponse,
    DegenerateFit,
    DomainError,
    NoValidCandidate,
    RankDeficient,
)
from .posteriors import InverseGamma, LocationScaleT, MultivariateT, PosteriorSet
from .specfun import log_gamma

__all__ = [
    "ModelFit",
    "StandardizedData",
    "bf01_finite_h",
    "bic",
    "enumerate_models",
    "fit",
    "linear_posteriors",
    "linear_test",
    "log_marginal",
    "r_squared",
    "select_model",
    "standardize",
]

_DEGENERATE_R2 = 1.0 - 1e-12
_TIE_TOL = 1e-9


@dataclass(frozen=True)
class StandardizedData:
    """Standardized response and design plus the maps back to raw units.

    ``y_raw = y_center + y_scale * y`` and
    ``X_raw[:, j] = x_center[j] + x_scale[j] * X[:, j]``.
    """

    y: np.ndarray
    X: np.ndarray
    y_center: float
    y_scale: float
    x_center: np.ndarray
    x_scale: np.ndarray
    names: tuple

    @property
    def n(self):
        return self.y.size

    @property
    def p(self):
        return self.X.shape[1]

    def raw_coefficients(self, beta, gamma):
        """Map standardized coefficients of model ``gamma`` to raw-scale ``(intercept, slopes)``."""
        idx = _indices(gamma, self.p)
        slopes = np.asarray(beta, dtype=float) * self.y_scale / self.x_scale[idx]
        intercept = self.y_center - float(slopes @ self.x_center[idx])
        return intercept, slopes


def standardize(y_raw, X_raw, names=None):
    """Centre and scale ``y`` and each column of ``X`` to mean 0, mean square 1."""
    y_raw = np.asarray(y_raw, dtype=float).ravel()
    X_raw = np.asarray(X_raw, dtype=float)
    if X_raw.ndim == 1:
        X_raw = X_raw[:, None]
    n, p = X_raw.shape
    if y_raw.size != n:
        raise DomainError(f"response has {y_raw.size} rows, design has {n}")
    if n <= p + 1:
        raise DomainError(f"need n > p + 1 observations, got n={n}, p={p}")
    if not (np.all(np.isfinite(y_raw)) and np.all(np.isfinite(X_raw))):
        raise DomainError("data contain non-finite values")
    names = tuple(names) if names is not None else tuple(f"x{j + 1}" for j in range(p))
    if len(names) != p:
        raise DomainError("one name per covariate column is required")

    y_center = float(y_raw.mean())
    yc = y_raw - y_center
    y_scale = math.sqrt(float(np.mean(yc ** 2)))
    if y_scale <= 1e-14 * max(1.0, abs(y_center)):
        raise ConstantResponse("response is constant")

    x_center = X_raw.mean(axis=0)
    Xc = X_raw - x_center
    x_scale = np.sqrt(np.mean(Xc ** 2, axis=0))
    flat = x_scale <= 1e-14 * np.maximum(1.0, np.abs(x_center))
    if np.any(flat):
        bad = [names[j] for j in np.flatnonzero(flat)]
        raise ConstantColumn(f"constant covariate column(s): {', '.join(bad)}")

    y = yc / y_scale
    X = Xc / x_scale
    y.setflags(write=False)
    X.setflags(write=False)
    x_center.setflags(write=False)
    x_scale.setflags(write=False)
    return StandardizedData(y, X, y_center, y_scale, x_center, x_scale, names)


def _as_gamma(gamma, p):
    """Normalise a model indicator (0/1 sequence, bool array or '0101' string)."""
    if isinstance(gamma, str):
        gamma = [int(c) for c in gamma if c in "01"] if set(gamma) <= {"0", "1"} else None
    if gamma is None:
        raise DomainError("gamma string may only contain 0 and 1")
    gamma = np.asarray(gamma)
    if gamma.shape != (p,) or not np.all((gamma == 0) | (gamma == 1)):
        raise DomainError(f"gamma must be a binary vector of length {p}")
    return gamma.astype(int)


def _indices(gamma, p):
    return np.flatnonzero(_as_gamma(gamma, p))


@dataclass(frozen=True)
class ModelFit:
    gamma: tuple
    size: int
    r2: float
    beta: np.ndarray
    xtx_inv: np.ndarray

    @property
    def sigma2(self):
        """MLE residual variance on the standardized scale, ``1 - R^2``."""
        return 1.0 - self.r2


def fit(data, gamma):
    """Least-squares fit of model ``gamma`` via QR; raises on rank deficiency."""
    gamma = _as_gamma(gamma, data.p)
    idx = np.flatnonzero(gamma)
    n = data.n
    if idx.size == 0:
        return ModelFit(tuple(gamma), 0, 0.0, np.zeros(0), np.zeros((0, 0)))
    Xg = data.X[:, idx]
    sv = np.linalg.svd(Xg, compute_uv=False)
    if sv[-1] <= n * np.finfo(float).eps * sv[0]:
        raise RankDeficient(
            "selected columns are linearly dependent: "
            + ", ".join(data.names[j] for j in idx),
            columns=[data.names[j] for j in idx],
        )
    q, r = np.linalg.qr(Xg)
    qty = q.T @ data.y
    beta = np.linalg.solve(r, qty)
    r_inv = np.linalg.inv(r)
    r2 = float(qty @ qty) / n
    return ModelFit(tuple(gamma), int(idx.size), min(r2, 1.0), beta, r_inv @ r_inv.T)


def r_squared(data, gamma):
    """Coefficient of determination of model ``gamma`` (0 for the empty model)."""
    return fit(data, gamma).r2


def _nondegenerate(model):
    if model.r2 >= _DEGENERATE_R2:
        raise DegenerateFit(f"model {''.join(map(str, model.gamma))} fits the response exactly")
    return model


def log_marginal(data, gamma, g):
    """``ln p(y | gamma, g)`` with cake priors on intercept and coefficients.

    The priors are ``alpha ~ N(0, g sigma^2)`` and
    ``beta_gamma ~ N(0, g sigma^2 (X_gamma' X_gamma / n)^{-1})`` with
    ``p(sigma^2) ~ 1 / sigma^2``.  Integrating them out gives
    ``ln Gamma(n/2) - (n/2) ln(n pi) - ((1+k)/2) ln(1 + g n)
    - (n/2) ln(1 - g n R^2 / (1 + g n))`` with ``k = |gamma|``; the last
    term is evaluated as ``ln(1 + g n (1 - R^2)) - ln(1 + g n)``.
    """
    if not (g > 0 and math.isfinite(g)):
        raise DomainError("g must be positive and finite")
    model = _nondegenerate(fit(data, gamma))
    n = data.n
    k1 = 1 + model.size
    gn = g * n
    return (
        log_gamma(n / 2.0) - 0.5 * n * math.log(n * math.pi)
        - 0.5 * k1 * math.log1p(gn)
        - 0.5 * n * (math.log1p(gn * model.sigma2) - math.log1p(gn))
    )


def bf01_finite_h(data, gamma0, gamma1, h):
    """``ln BF01(h)`` with ``g_j = h ** (1 / (1 + |gamma_j|))``."""
    if not (h > 0 and math.isfinite(h)):
        raise DomainError("h must be positive and finite")
    g0 = h ** (1.0 / (1 + int(np.sum(_as_gamma(gamma0, data.p)))))
    g1 = h ** (1.0 / (1 + int(np.sum(_as_gamma(gamma1, data.p)))))
    return log_marginal(data, gamma0, g0) - log_marginal(data, gamma1, g1)


def bic(data, gamma):
    """``n ln(2 pi sigma2_hat) - n + |gamma| ln n`` on the standardized scale."""
    model = _nondegenerate(fit(data, gamma))
    n = data.n
    return n * math.log(2.0 * math.pi * model.sigma2) - n + model.size * math.log(n)


def linear_test(data, gamma0, gamma1, settings=None):
    """Test ``H0: gamma = gamma0`` against ``H1: gamma = gamma1``.

    ``nu = |gamma1| - |gamma0|``.  In the limit ``lambda_Bayes`` is the BIC
    difference plus ``delta``; for finite ``h`` it is ``-2 ln BF01(h) + delta``.
    """
    m0 = _nondegenerate(fit(data, gamma0))
    m1 = _nondegenerate(fit(data, gamma1))
    n = data.n
    nu = m1.size - m0.size
    lam_lrt = n * math.log(m0.sigma2) - n * math.log(m1.sigma2)
    delta = settings.delta if settings is not None else 0.0
    if settings is None or settings.is_limit:
        lam = penalized_lrt(lam_lrt, nu, n, settings)
    else:
        lam = -2.0 * bf01_finite_h(data, gamma0, gamma1, settings.h) + delta
    return make_result(
        lam, lam_lrt, nu, n, settings,
        gamma0="".join(map(str, m0.gamma)), gamma1="".join(map(str, m1.gamma)),
        bic0=bic(data, gamma0), bic1=bic(data, gamma1),
    )


def enumerate_models(p, max_size=None):
    """All binary ``gamma`` vectors of length ``p`` with at most ``max_size`` ones."""
    max_size = p if max_size is None else min(max_size, p)
    out = []
    for k in range(max_size + 1):
        for idx in itertools.combinations(range(p), k):
            gamma = np.zeros(p, dtype=int)
            gamma[list(idx)] = 1
            out.append(gamma)
    return out


def _rank_cmp(a, b):
    if abs(a[0] - b[0]) > _TIE_TOL:
        return -1 if a[0] < b[0] else 1
    return (a[1:] > b[1:]) - (a[1:] < b[1:])


def select_model(data, candidates):
    """Rank candidate models by BIC (smaller first).

    Near ties (within 1e-9) go to the smaller model, then the
    lexicographically smaller ``gamma``.  Candidates that are rank deficient
    or fit exactly are skipped.

    Returns
    -------
    list of dict
        ``{"gamma", "size", "bic", "r2"}`` in rank order.
    """
    rows = []
    for cand in candidates:
        gamma = _as_gamma(cand, data.p)
        try:
            model = _nondegenerate(fit(data, gamma))
        except (RankDeficient, DegenerateFit):
            continue
        rows.append((bic(data, gamma), model.size, model.gamma, model.r2))
    if not rows:
        raise NoValidCandidate("no candidate model could be fitted")
    rows.sort(key=functools.cmp_to_key(_rank_cmp))
    return [
        {"gamma": "".join(map(str, g)), "size": k, "bic": b, "r2": r2}
        for b, k, g, r2 in rows
    ]


def linear_posteriors(data, gamma):
    """Flat-limit posteriors of intercept, coefficients and ``sigma^2`` (standardized scale)."""
    model = _nondegenerate(fit(data, gamma))
    n = data.n
    s2 = model.sigma2
    params = {
        "alpha": LocationScaleT(n, 0.0, s2 / n),
        "sigma2": InverseGamma(n / 2.0, n * s2 / 2.0),
    }
    if model.size:
        params["beta"] = MultivariateT(n, model.beta, s2 * model.xtx_inv)
    return PosteriorSet({"H": params})
