"""Exception types shared by every module."""


class SupqError(Exception):
    """Base class for library errors."""


class DimensionError(SupqError, ValueError):
    """Shapes or layouts do not match."""


class ParameterError(SupqError, ValueError):
    """A parameter is outside its documented domain."""


class CapacityError(SupqError, MemoryError):
    """A computation would exceed the configured term or column cap."""


class BudgetError(SupqError, ValueError):
    """A Monte Carlo budget is too small for the requested estimate."""


class SingularityError(SupqError, ArithmeticError):
    """A matrix that must be invertible is numerically singular."""
