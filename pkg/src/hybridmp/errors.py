"""Exception types raised across the package."""


class HmpError(Exception):
    """Base class for all errors raised by hybridmp."""


class DomainError(HmpError, ValueError):
    """An argument lies outside the range where the operation is defined."""


class EdgeListParseError(DomainError):
    """A line of an edge-list file could not be parsed."""

    def __init__(self, lineno, line, reason):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line!r}")


class DegenerateInstanceError(HmpError):
    """The misinformation cannot be prevented in any measurable way.

    Raised by the lower-bound estimator when its sample budget is exhausted,
    which happens when f*(S_L) is zero or vanishingly small.
    """


class InvariantError(HmpError, RuntimeError):
    """An internal invariant was violated (a bug or a corrupted realization)."""


class OracleSizeError(DomainError):
    """The instance is too large for exhaustive enumeration."""
