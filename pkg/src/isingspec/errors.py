"""Exception hierarchy shared by all modules."""


class IsingSpecError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(IsingSpecError, ValueError):
    """A value violates its physical or numerical domain."""


class ValidityError(ParameterError):
    """Inputs are individually sane but outside the model's validity regime."""


class CapacityError(IsingSpecError):
    """Requested instance exceeds a hard size limit of an exact method."""


class ConfigError(IsingSpecError):
    """Run configuration is malformed or inconsistent."""


class DegenerateInputError(IsingSpecError):
    """Input carries no usable signal (e.g. an all-zero state or spectrum)."""


class NumericsError(IsingSpecError):
    """A numerical sanity bound was violated (indicates a bug or bad grid)."""
