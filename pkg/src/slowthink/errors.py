"""Semantic exception hierarchy shared by all modules."""


class SlowthinkError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SlowthinkError, ValueError):
    """An input value violates a model or data contract."""


class RangeError(SlowthinkError, ValueError):
    """An index or argument lies outside its declared domain."""


class PreconditionError(SlowthinkError, ValueError):
    """A formula was called outside the regime where it is defined."""


class ResourceLimitError(SlowthinkError, RuntimeError):
    """A request would exceed an explicit size or node budget."""


class TraceParseError(SlowthinkError, ValueError):
    """A trace file record could not be parsed."""


class FitError(SlowthinkError, RuntimeError):
    """A curve fit has too few usable points to proceed."""
