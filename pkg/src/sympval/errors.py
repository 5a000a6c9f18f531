"""Exception types shared across the package."""


class SympvalError(Exception):
    """Base class; the CLI maps subclasses to exit codes."""

    exit_code = 2


class DeterminantError(SympvalError):
    pass


class DimensionError(SympvalError):
    pass


class ZeroFormError(SympvalError):
    pass


class FitError(SympvalError):
    pass


class DivisionError(SympvalError):
    pass


class DegenerateError(SympvalError):
    pass


class ZeroAcceptanceError(SympvalError):
    pass


class RankError(SympvalError):
    pass


class MissingVolumeError(SympvalError):
    pass


class HypothesisError(SympvalError):
    pass


class RangeError(SympvalError):
    pass


class SolveError(SympvalError):
    pass


class FormatError(SympvalError):
    """Malformed input document; the message names the offending field."""


class CapacityError(SympvalError):
    exit_code = 3


class TruncationWarning(UserWarning):
    """Tail bound of a truncated Rogers sum exceeds 1% of the main term."""
