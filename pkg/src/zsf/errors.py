"""Exception hierarchy shared by every module."""


class ZsfError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ZsfError, ValueError):
    """Malformed input: a bad Cayley table, unparseable sequence, unknown name."""


class DomainError(ZsfError, ValueError):
    """Input is well formed but outside the operation's domain."""


class CapacityError(ZsfError):
    """A search or table would exceed its configured budget."""
