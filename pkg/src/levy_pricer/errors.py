"""Exception hierarchy shared by all modules."""


class LevyPricerError(Exception):
    """Base class for every error raised by the package."""


class DomainError(LevyPricerError, ValueError):
    """A parameter lies outside the domain where an operation is defined."""


class CutError(DomainError):
    """An exponent was evaluated on one of its branch cuts."""


class StripError(DomainError):
    """A damping offset or contour leaves the strip of analyticity."""


class ContourError(DomainError):
    """Shape functions violate the sign/monotonicity requirements of a contour."""


class PlanError(DomainError):
    """A sampling plan is internally inconsistent or does not match its inputs."""


class NumericalError(LevyPricerError, ArithmeticError):
    """A computation produced non-finite values or failed a consistency check."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
