"""Exception hierarchy shared by every module."""


class TernstabError(Exception):
    """Base class for all errors raised by ternstab."""


class DomainMismatch(TernstabError, TypeError):
    pass


class TooLarge(TernstabError):
    """An exhaustive scan would exceed the evaluation budget."""


class BudgetExceeded(TernstabError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class Overflow(TernstabError, OverflowError):
    pass


class NotAnAlgebra(TernstabError):
    pass


class NoConvergenceCertificate(TernstabError):
    pass


class NotConverged(TernstabError):
    def __init__(self, n_max, last_residual, point=None):
        super().__init__(
            f"Cauchy criterion not met after {n_max} steps "
            f"(last residual {last_residual:.3e}) at {point!r}"
        )
        self.n_max = n_max
        self.last_residual = last_residual
        self.point = point


class ScalingLawViolated(TernstabError):
    pass


class PreconditionUnmet(TernstabError):
    pass


class AssociativityFailed(TernstabError):
    pass


class DegenerateInput(TernstabError):
    pass


class DichotomyViolated(TernstabError, AssertionError):
    """Both branches failed where the dichotomy says one must hold."""


class ExpressionError(TernstabError, ValueError):
    pass


class ConfigError(TernstabError, ValueError):
    pass


class UnknownSeries(TernstabError, KeyError):
    pass
