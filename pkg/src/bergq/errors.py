"""Exception hierarchy.

Every error raised on purpose by the package derives from ``BergqError`` so
callers (and the CLI) can separate library failures from programming bugs.
"""


class BergqError(Exception):
    """Base class for all package errors."""


class InvalidInputError(BergqError, ValueError):
    """Malformed or out-of-range input."""


class GroupTooLargeError(BergqError):
    """Group closure exceeded the configured element cap."""


class NotACharacterError(BergqError, ValueError):
    """A value table is not a one-dimensional character of the group."""


class UnsupportedError(BergqError):
    """Operation is not implemented for this kind of input."""


class NearSingularError(BergqError, ArithmeticError):
    """Evaluation point lies (numerically) on a singular set."""


class DomainError(BergqError, ValueError):
    """Point lies outside the domain of definition."""


class SamplerError(BergqError):
    """Monte-Carlo sampler could not produce points efficiently."""
