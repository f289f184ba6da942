"""Exception types shared across the package."""


class ArgumentError(ValueError):
    """A precondition on an argument was violated."""


class CapabilityError(RuntimeError):
    """The request exceeds an exact-computation size limit."""


class NumericalError(ArithmeticError):
    """An iterative numerical routine failed to converge."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class InequalityViolation(AssertionError):
    """A proven inequality was observed to fail."""
