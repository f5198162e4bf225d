"""Exception types shared across the pipeline, mapped to CLI exit codes."""


class ShiftlinkError(Exception):
    """Base class for all pipeline errors."""

    exit_code = 1


class ConfigError(ShiftlinkError):
    """Bad configuration or usage."""

    exit_code = 1


class ValidationError(ShiftlinkError):
    """Malformed or inconsistent input data."""

    exit_code = 2


class DivergenceError(ShiftlinkError):
    """Non-finite values during training or inference."""

    exit_code = 3


class RemoteEncoderError(ShiftlinkError):
    """Remote encoder unreachable or incompatible."""

    exit_code = 4
