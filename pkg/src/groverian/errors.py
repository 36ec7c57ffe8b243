"""Exception types raised across the package."""


class GroverianError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(GroverianError, ValueError):
    pass


class LevelMismatch(DimensionMismatch):
    pass


class ZeroVector(GroverianError, ValueError):
    pass


class NotNormalized(GroverianError, ValueError):
    pass


class LabelOutOfRange(GroverianError, ValueError):
    pass


class IndexOutOfRange(GroverianError, IndexError):
    pass


class RangeViolation(GroverianError, ValueError):
    """An angle or phase lies outside its documented interval."""


class BudgetExceeded(GroverianError, RuntimeError):
    """A brute-force evaluation would exceed the configured budget."""


class OutOfRange(GroverianError, ValueError):
    pass


class NotBipartite(GroverianError, ValueError):
    pass


class StateFileError(GroverianError, ValueError):
    """Malformed state file."""
