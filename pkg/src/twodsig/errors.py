"""Exception hierarchy shared by all modules."""


class TwodsigError(Exception):
    """Base class for library errors."""


class InputError(TwodsigError, ValueError):
    """Malformed input: bad shapes, letters out of range, unreadable files."""


class ResourceLimitError(TwodsigError, RuntimeError):
    """A configured memory or enumeration cap would be exceeded."""


class UnsupportedError(TwodsigError, ValueError):
    """The requested case is outside what an operation supports."""
