"""Exception hierarchy shared by every layer.

Each error also derives from the closest builtin so callers that only know
``ValueError`` / ``ArithmeticError`` keep working.
"""


class TripletError(Exception):
    """Base class for all domain errors raised by this package."""


class ConfigurationError(TripletError, ValueError):
    """Invalid configuration value or combination (clip size, kernel, heads...)."""


class DataError(TripletError, ValueError):
    """Malformed or inconsistent input data (labels, splits, log files)."""


class DimensionError(TripletError, ValueError):
    """Tensor shapes violate an operation's shape contract."""


class DegenerateBatchError(DimensionError):
    """Batch statistics requested over fewer than two elements per channel."""


class NumericError(TripletError, ArithmeticError):
    """Non-finite values where finite ones are required."""


class ContractError(TripletError, RuntimeError):
    """An API precondition that is not about data or shapes was violated."""
