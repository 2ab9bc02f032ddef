"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`ConstrictionError`, so callers (and the CLI) can separate bad input
from bugs.
"""


class ConstrictionError(Exception):
    """Base class for all library errors."""


class DomainError(ConstrictionError):
    """Objects built on different state spaces were mixed."""


class ValidationError(ConstrictionError, ValueError):
    """An input violates a structural invariant.

    ``field`` optionally names the offending location (a block index, a
    JSON path, a constraint label).
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class SizeError(ConstrictionError):
    """An enumeration would exceed the configured size limit."""

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class ConditioningError(ConstrictionError):
    """Conditioning on an event that is null for (part of) the belief set."""


class PreconditionError(ConstrictionError):
    """An operation was called outside the domain where it is defined."""


class CoherenceError(ConstrictionError):
    """A selected value lies outside the coherent range."""


class SelectionError(ConstrictionError):
    """A selected measure is not a member of the credal set."""


class DegenerateError(ConstrictionError):
    """A linear system has no unique solution.

    ``dimension`` is the dimension of the solution space.
    """

    def __init__(self, message, dimension):
        super().__init__(message)
        self.dimension = dimension
