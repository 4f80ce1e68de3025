"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An operation was called with inputs violating its stated preconditions."""


class ResourceLimitError(RuntimeError):
    """The request would exceed a documented table-size or enumeration budget."""


class NumericalInstabilityError(ArithmeticError):
    """Two evaluation routes that must agree numerically disagreed beyond tolerance."""

    def __init__(self, message, first, second):
        super().__init__(message)
        self.first = first
        self.second = second


class DegenerateFiberError(ArithmeticError):
    """The singular polynomial vanishes identically, so the fiber is the whole line."""


class InternalConsistencyError(RuntimeError):
    """A structural property the algorithm guarantees failed to hold; indicates a bug."""
