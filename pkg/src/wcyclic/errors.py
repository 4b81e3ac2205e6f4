"""Exception hierarchy shared by every module."""


class WcyclicError(Exception):
    """Base class for all errors raised by the package."""


class ParseError(WcyclicError, ValueError):
    """Malformed cycle notation, group descriptor or command line."""


class CapacityError(WcyclicError, RuntimeError):
    """A configured size cap (group order, subgroup count) was exceeded."""


class IntegrityError(WcyclicError, ArithmeticError):
    """A numerical result failed its own consistency check."""
