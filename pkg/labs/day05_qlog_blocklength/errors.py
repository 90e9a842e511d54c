"""
Exception hierarchy shared by every module of the lab.
"""


class BlocklengthError(Exception):
    """Base class for all lab errors."""

    pass


class DomainError(BlocklengthError, ValueError):
    """Argument outside the domain of an operation."""

    pass


class DegenerateSourceError(BlocklengthError):
    """Zero varentropy where a skewness-dependent quantity was requested."""

    pass


class CapExceededError(BlocklengthError):
    """An enumeration would exceed its size cap."""

    pass


class MgfOverflowError(BlocklengthError, OverflowError):
    """Log moment-generating function above the representable range."""

    pass


class MomentOrderError(BlocklengthError, ValueError):
    """A moment order that was not computed was requested."""

    pass


class InsufficientSamplesError(BlocklengthError):
    """Too few Monte Carlo samples to resolve the requested tail."""

    pass


class DegenerateFitError(BlocklengthError):
    """Log-log fit on a grid or on values that cannot support it."""

    pass


class ConfigError(BlocklengthError):
    """Invalid or unparsable run configuration."""

    pass
