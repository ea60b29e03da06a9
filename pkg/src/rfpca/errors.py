"""Exception and warning classes.

Validation problems (bad input, out-of-range arguments) derive from
``ValidationError``; numerical breakdowns (cut-locus logs, solvers that do
not converge) derive from ``NumericalError``. The CLI maps the two families
onto distinct exit codes.
"""


class RfpcaError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(RfpcaError, ValueError):
    pass


class NumericalError(RfpcaError, ArithmeticError):
    pass


class DimensionMismatch(ValidationError):
    pass


class InvalidTangent(ValidationError):
    pass


class NotSkew(ValidationError):
    pass


class DegenerateInput(ValidationError):
    pass


class AntipodalPair(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class KOutOfRange(ValidationError):
    pass


class GammaOutOfRange(ValidationError):
    pass


class ZeroVariance(ValidationError):
    pass


class EmptyKernelWindow(ValidationError):
    pass


class ZeroRowSum(ValidationError):
    pass


class NegativeCoordinate(ValidationError):
    pass


class LatitudeOutOfRange(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class OffManifold(ValidationError):
    pass


class LogUndefined(NumericalError):
    """A logarithm was requested at (or numerically at) the cut locus."""


class NoConvergence(NumericalError):
    def __init__(self, message, gradient_norm=None):
        super().__init__(message)
        self.gradient_norm = gradient_norm


class RankDeficientWarning(UserWarning):
    pass


class InsufficientComponentsWarning(UserWarning):
    pass
