"""Posterior distribution objects returned by the tests.

Inverse-gamma uses the shape/RATE convention: ``IG(a, b)`` has density
proportional to ``x**(-a-1) exp(-b/x)`` and mean ``b / (a - 1)``.  That is
the convention behind ``IG(n/2, n sigma_hat^2 / 2)``, whose mean approaches
``sigma_hat^2`` as ``n`` grows.  (scipy's ``invgamma`` calls the rate
``scale``.)

Location-scale Student-t is parametrised by degrees of freedom, location and
SQUARED scale, ``t_nu(m, s2)``.
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DomainError

__all__ = ["InverseGamma", "LocationScaleT", "MultivariateT", "PosteriorSet"]


class _Univariate:
    def _frozen(self):
        raise NotImplementedError

    def log_density(self, x):
        return self._frozen().logpdf(x)

    def density(self, x):
        return self._frozen().pdf(x)

    def cdf(self, x):
        return self._frozen().cdf(x)

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if np.any(~((p > 0) & (p < 1))):
            raise DomainError("quantile probability must lie strictly in (0, 1)")
        return self._frozen().ppf(p)

    def var(self):
        return float(self._frozen().var())

    def sample(self, rng, size=None):
        """Draw from the distribution with a caller-owned ``numpy.random.Generator``."""
        return self._frozen().rvs(size=size, random_state=rng)


@dataclass(frozen=True)
class InverseGamma(_Univariate):
    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0 and self.rate > 0):
            raise DomainError("inverse-gamma shape and rate must be positive")

    def _frozen(self):
        return stats.invgamma(self.shape, scale=self.rate)

    def mean(self):
        if self.shape <= 1:
            return np.inf
        return self.rate / (self.shape - 1.0)


@dataclass(frozen=True)
class LocationScaleT(_Univariate):
    df: float
    loc: float
    scale2: float

    def __post_init__(self):
        if not (self.df > 0 and self.scale2 > 0):
            raise DomainError("t degrees of freedom and squared scale must be positive")

    def _frozen(self):
        return stats.t(self.df, loc=self.loc, scale=np.sqrt(self.scale2))

    def mean(self):
        return self.loc if self.df > 1 else np.nan


@dataclass(frozen=True)
class MultivariateT:
    """Multivariate Student-t with location vector and shape (scale) matrix."""

    df: float
    loc: np.ndarray
    shape_matrix: np.ndarray

    def __post_init__(self):
        loc = np.atleast_1d(np.asarray(self.loc, dtype=float))
        shape = np.atleast_2d(np.asarray(self.shape_matrix, dtype=float))
        if shape.shape != (loc.size, loc.size):
            raise DomainError("shape matrix does not match location dimension")
        if not np.allclose(shape, shape.T) or np.any(np.linalg.eigvalsh(shape) <= 0):
            raise DomainError("shape matrix must be symmetric positive definite")
        object.__setattr__(self, "loc", loc)
        object.__setattr__(self, "shape_matrix", shape)

    def _frozen(self):
        return stats.multivariate_t(self.loc, self.shape_matrix, df=self.df)

    def log_density(self, x):
        return self._frozen().logpdf(x)

    def density(self, x):
        return self._frozen().pdf(x)

    def mean(self):
        return self.loc.copy()

    def covariance(self):
        if self.df <= 2:
            raise DomainError("covariance needs more than 2 degrees of freedom")
        return self.shape_matrix * self.df / (self.df - 2.0)

    def sample(self, rng, size=None):
        return self._frozen().rvs(size=size, random_state=rng)


class PosteriorSet:
    """Parameter posteriors keyed by hypothesis, then parameter name."""

    def __init__(self, by_hypothesis):
        self._data = {hyp: dict(params) for hyp, params in by_hypothesis.items()}

    def __getitem__(self, key):
        if isinstance(key, tuple):
            hyp, name = key
            return self._data[hyp][name]
        return dict(self._data[key])

    def hypotheses(self):
        return list(self._data)

    def names(self, hypothesis):
        return list(self._data[hypothesis])

    def items(self):
        for hyp, params in self._data.items():
            for name, dist in params.items():
                yield hyp, name, dist

    def __repr__(self):
        inner = ", ".join(f"{h}:{n}" for h, n, _ in self.items())
        return f"PosteriorSet({inner})"
