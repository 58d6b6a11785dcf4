"""Exception types shared across the package."""


class MinsplitError(Exception):
    """Base class for all package errors."""


class ValidationError(MinsplitError, ValueError):
    """A value violates the invariants of its type."""


class NotHermitian(ValidationError):
    pass


class NotSquare(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NotPrime(ValidationError):
    def __init__(self, d):
        super().__init__(f"d must be prime (got {d})")
        self.d = d


class IndexOutOfRange(ValidationError, IndexError):
    pass


class ZeroMass(MinsplitError):
    """Conditioning on an event of probability zero."""


class IncompleteLabeling(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class NoConvergence(MinsplitError):
    """An iterative routine ran out of iterations; ``best`` holds its best iterate."""

    def __init__(self, max_iter, best=None, gap=None):
        super().__init__(f"no convergence after {max_iter} iterations (certified gap {gap})")
        self.max_iter = max_iter
        self.best = best
        self.gap = gap
