"""Exception types shared across the package."""


class RandsumError(Exception):
    """Base class for all package errors."""


class InvalidParameter(RandsumError, ValueError):
    pass


class DegenerateSum(RandsumError):
    """Raised when Var(S) = 0, so W cannot be standardized."""


class UnboundedSupport(RandsumError):
    pass


class ZeroMean(RandsumError):
    pass


class ZeroVariance(RandsumError):
    pass


class NotCentered(RandsumError):
    pass


class IncompatibleKind(RandsumError):
    pass


class InvalidCoupling(RandsumError):
    """A user-supplied joint pmf does not have the size-bias marginals."""


class ExactUnavailable(RandsumError):
    pass


class MissingStatistic(RandsumError):
    pass


class NegativeDPresent(RandsumError):
    pass


class NonzeroMean(RandsumError):
    pass


class NoSpecialization(RandsumError):
    pass


class QuadratureFailure(RandsumError):
    pass


class EmptySample(RandsumError, ValueError):
    pass


class SpecSyntaxError(RandsumError, ValueError):
    """Malformed model specification string."""
