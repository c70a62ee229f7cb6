"""Exception types raised across the package."""

from __future__ import annotations


class ResourceLimitError(RuntimeError):
    """An exact search or count exceeded its configured node budget."""


class SizeLimitError(ValueError):
    """Input graph is larger than the configured cap for this operation."""


class NotRegularError(ValueError):
    pass


class InvalidModulusError(ValueError):
    pass


class DivisibilityError(ValueError):
    pass


class ExhaustedAttemptsError(RuntimeError):
    """Rejection sampling gave up; the requested parameters are likely infeasible."""


class AdjacentPairError(ValueError):
    def __init__(self, u: int, v: int):
        super().__init__(f"sequence contains adjacent pair ({u}, {v})")
        self.pair = (u, v)


class SizeMismatchError(ValueError):
    pass


class MalformedColoringError(ValueError):
    pass


class GraphParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
