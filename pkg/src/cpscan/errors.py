"""Exception types raised by cpscan."""


class CpscanError(Exception):
    """Base class for all cpscan errors."""


class ParameterError(CpscanError, ValueError):
    """A parameter lies outside its admissible range."""


class DataError(CpscanError, ValueError):
    """Input data is malformed (non-finite, ragged, wrong shape)."""


class DegenerateScaleError(CpscanError, ArithmeticError):
    """The jackknife scale estimate is zero, so the statistic cannot be normalized."""


class TableMismatchError(CpscanError, ValueError):
    """A critical-value table was built for a different grid size or weight."""
