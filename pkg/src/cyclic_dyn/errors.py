"""Exception types raised by the toolkit."""


class CyclicDynError(Exception):
    """Base class for all toolkit errors."""


class DuplicatePoints(CyclicDynError, ValueError):
    pass


class InternalInvariantViolation(CyclicDynError, AssertionError):
    """A structural identity failed; this is a bug, never bad input."""


class NotRational(CyclicDynError, TypeError):
    pass


class MissingQ(CyclicDynError, ValueError):
    pass


class DimensionMismatch(CyclicDynError, ValueError):
    pass


class TooLarge(CyclicDynError, ValueError):
    pass


class ScaleTooLarge(CyclicDynError, ValueError):
    pass


class SchemaMismatch(CyclicDynError, ValueError):
    pass
