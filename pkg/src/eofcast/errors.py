"""Exception hierarchy.

Every error raised by the package derives from :class:`EofcastError` and
belongs to one of three families, which the command line maps onto exit
codes: configuration problems, data problems and numerical failures.
"""


class EofcastError(Exception):
    """Base class for all package errors."""


class ConfigError(EofcastError):
    """Invalid pipeline configuration."""


class DataError(EofcastError, ValueError):
    """Input data violates a structural or physical contract."""


class NumericalError(EofcastError, ArithmeticError):
    """A numerical routine failed to produce a usable result."""


# -- data errors ------------------------------------------------------------

class MalformedRow(DataError):
    pass


class MissingCell(DataError):
    pass


class DuplicateCell(DataError):
    pass


class NonFiniteValue(DataError):
    pass


class EmptySelection(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class LengthMismatch(DataError):
    pass


class EmptySeries(DataError):
    pass


class BandTooNarrow(DataError):
    pass


class SeriesTooShort(DataError):
    pass


class ZeroVariance(DataError):
    """A location has zero interannual variance."""


class AllZeroActuals(DataError):
    pass


class ZeroNaiveError(DataError):
    """Constant training series; the MASE scale is zero."""


# -- numerical failures -----------------------------------------------------

class SvdFailure(NumericalError):
    pass


class NonFiniteLoss(NumericalError):
    """Training diverged; usually the learning rate is too high."""


class NegativePrecipitation(DataError):
    pass
