"""Exception hierarchy shared by every module in the package."""


class CakeError(Exception):
    """Base class for all package errors."""


class DomainError(CakeError, ValueError):
    """An argument lies outside the domain of the function."""


class DegenerateSample(CakeError, ValueError):
    """A sample (or group) has zero MLE variance."""


class DegenerateFit(CakeError, ValueError):
    """A linear model fits the response exactly (R^2 = 1)."""


class RankDeficient(CakeError, ValueError):
    """Selected design columns are linearly dependent."""

    def __init__(self, message, columns=None):
        super().__init__(message)
        self.columns = list(columns or [])


class ConstantColumn(CakeError, ValueError):
    """A raw covariate column has zero variance."""


class ConstantResponse(CakeError, ValueError):
    """The raw response has zero variance."""


class NoValidCandidate(CakeError, ValueError):
    """Model selection was given no usable candidate model."""


class NonConvergent(CakeError, RuntimeError):
    """Adaptive quadrature hit its subdivision limit before reaching tolerance."""


class DegenerateIntegrand(CakeError, RuntimeError):
    """The log-integrand has no finite maximum."""


class ScenarioError(CakeError, ValueError):
    """A simulation scenario file or object is malformed."""
