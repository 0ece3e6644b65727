"""Exception hierarchy for the ewg package."""


class EWGError(Exception):
    """Base class for all errors raised by ewg."""


class DomainError(EWGError, ValueError):
    """An argument lies outside the domain of the requested function."""


class TruncationError(EWGError, ArithmeticError):
    """A series did not reach its tolerance within the allowed number of terms.

    The partial sum accumulated so far is kept on ``partial_sum``.
    """

    def __init__(self, message, partial_sum=float("nan"), terms=0):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.terms = terms


class DivergenceError(EWGError, ArithmeticError):
    """A series or integral diverges for the given arguments."""


class QuadratureError(EWGError, ArithmeticError):
    """Adaptive quadrature failed to meet its error target."""

    def __init__(self, message, value=float("nan"), abserr=float("nan")):
        super().__init__(message)
        self.value = value
        self.abserr = abserr


class ConditioningError(EWGError, ArithmeticError):
    """Conditioning on an event of (numerically) zero probability."""


class ConsistencyError(EWGError, AssertionError):
    """Two independent evaluation routes disagree beyond tolerance."""
