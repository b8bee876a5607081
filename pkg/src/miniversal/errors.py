"""Exception types shared across the package."""


class MiniversalError(Exception):
    """Base class for all errors raised by this package."""


class InvalidLambda(MiniversalError, ValueError):
    """An H_m(lambda) block was requested with lambda = 0 or (-1)**(m+1)."""


class InvalidStructure(MiniversalError, ValueError):
    """A canonical structure descriptor is malformed or violates its invariants."""


class Inconsistent(MiniversalError):
    """A linear system has no solution within the requested tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotTransversal(MiniversalError):
    """The tangent space and the pattern space do not form a direct sum."""


class NotSpanning(MiniversalError):
    """The tangent space plus the pattern space is not the whole matrix space."""


class MaxIterExceeded(MiniversalError):
    """The reduction iteration failed to converge; the partial trace is attached."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
