"""Exception hierarchy shared across the package."""


class MultivitalError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class ConfigError(MultivitalError):
    """Invalid parameter value or malformed configuration document."""

    code = "config"


class CubeFormatError(MultivitalError):
    """Raw-cube file cannot be read: bad magic, wrong version, short payload."""

    code = "cube-format"


class ProcessingError(MultivitalError):
    """Input data cannot be processed (degenerate, out of range, too short)."""

    code = "processing"
