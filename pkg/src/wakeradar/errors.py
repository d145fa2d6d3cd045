"""Exception types shared across the package."""


class WakeRadarError(Exception):
    """Base class for all package errors."""


class DomainError(WakeRadarError, ValueError):
    """A numeric input or configuration value is outside its valid domain."""


class DimensionError(DomainError):
    """An array shape does not match the radar configuration."""


class FormatError(WakeRadarError):
    """File content does not conform to the expected on-disk format."""


class NoCandidateError(DomainError):
    """No unmasked spectral cell is available for selection."""


class InsufficientSignalError(DomainError):
    """Too little signal energy to complete the requested analysis."""


class NoStateError(DomainError):
    """A track operation was requested before any association exists."""
