"""Exception hierarchy shared by every coopl module.

The CLI maps these onto exit codes: ``InvalidInput`` -> 2,
``NotRealizable`` -> 3, ``InternalLimit`` -> 4.
"""


class CooplError(Exception):
    """Base class for all library errors."""


class InvalidInput(CooplError, ValueError):
    """Malformed game, distribution, sample set or formula."""


class PlayerCountMismatch(InvalidInput):
    pass


class NotAPath(InvalidInput):
    """A coalition handed to a path-based routine is not an s-t path."""


class NotRealizable(CooplError):
    """No hypothesis in the target class is consistent with the samples."""


class Inconsistent(NotRealizable):
    """A linear system has no solution (rank(A) < rank(A|b))."""


class InternalLimit(CooplError):
    """A configured resource cap was hit (retry cap, exhaustive cap, r_max)."""


class RetryLimitExceeded(InternalLimit):
    pass


class ExhaustiveCapExceeded(InternalLimit):
    pass


class ToleranceLimitExceeded(NotRealizable, InternalLimit):
    """The threshold-fitting loop ran past ``r_max`` without a consistent fit."""
