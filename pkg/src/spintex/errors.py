"""Exception types raised by the package."""


class SpintexError(Exception):
    """Base class for package-specific errors."""


class InvalidParameter(SpintexError, ValueError):
    """A configuration value is missing, malformed, or out of range."""


class GridMismatch(SpintexError, ValueError):
    """Arrays passed to an operation do not share the expected grid shape."""


class NumericalFailure(SpintexError, RuntimeError):
    """A numerical invariant was violated during integration (NaN, norm loss)."""
