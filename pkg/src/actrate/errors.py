"""Exception taxonomy shared by all actrate modules.

Every error raised on purpose by this package derives from ActrateError, so
callers can catch one base type. The split mirrors how the functions fail:
bad probability data, bad call shapes, out-of-range scalars, violated numeric
invariants, and searches that would be too large to run.
"""

__all__ = [
    "ActrateError",
    "InvalidDistributionError",
    "UsageError",
    "DomainError",
    "IntegrityError",
    "SpecFormatError",
    "SearchSpaceError",
]


class ActrateError(Exception):
    """Base class for all errors raised deliberately by actrate."""


class InvalidDistributionError(ActrateError, ValueError):
    """A probability table has negative entries or mass not summing to 1."""


class UsageError(ActrateError, ValueError):
    """A call is malformed: overlapping axis lists, mismatched shapes, etc."""


class DomainError(ActrateError, ValueError):
    """A scalar argument lies outside its documented domain."""


class IntegrityError(ActrateError, ArithmeticError):
    """A quantity violated a numeric invariant beyond tolerated float noise."""


class SpecFormatError(ActrateError, ValueError):
    """A problem-description JSON document is malformed.

    ``path`` names the offending location, e.g. ``"channel[2][0]"``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class SearchSpaceError(ActrateError, RuntimeError):
    """A search was refused because its enumeration would be too large.

    Carries the estimated evaluation count and the configured limit so the
    caller can decide how to shrink the request.
    """

    def __init__(self, required: int, allowed: int, what: str = "search"):
        self.required = int(required)
        self.allowed = int(allowed)
        super().__init__(
            f"{what} needs ~{required:d} evaluations, above the configured "
            f"limit of {allowed:d}; reduce grid/alphabet sizes or raise the limit"
        )
