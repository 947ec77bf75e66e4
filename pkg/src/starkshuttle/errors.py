class StarkError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(StarkError, ValueError):
    """Input outside an operation's domain."""


class ConvergenceError(StarkError, ArithmeticError):
    """A numerical procedure did not reach its tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class TruncationError(ConvergenceError):
    """Truncated number basis too small to certify a result."""

    def __init__(self, message, achieved=None, required_dim=None):
        super().__init__(message, achieved)
        self.required_dim = required_dim
