"""Exception types shared across the package."""


class LinetessError(Exception):
    """Base class for all package-specific errors."""


class DegenerateTripleError(LinetessError):
    """A line triple is (numerically) parallel or its triangle has ~zero area."""


class PointOnLineError(LinetessError):
    """A query point lies on (or too close to) a sampled line."""


class NotEnoughRecordsError(LinetessError):
    """An order statistic was requested beyond the number of qualifying records."""


class InsufficientWindowError(LinetessError):
    """A line sample does not cover the guard window required by an observation window."""


class DomainError(LinetessError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class EmptySampleError(LinetessError, ValueError):
    """An empirical statistic was requested from zero samples."""
