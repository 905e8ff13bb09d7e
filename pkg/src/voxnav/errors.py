"""Exception hierarchy shared across the pipeline, mapped to CLI exit codes."""

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_NOT_LOCATED = 3
EXIT_NO_PATH = 4
EXIT_IO_FORMAT = 5


class VoxnavError(Exception):
    """Base class for all voxnav errors."""

    exit_code = EXIT_ERROR


class ParseError(VoxnavError):
    """Malformed input record; message names the offending line."""

    exit_code = EXIT_IO_FORMAT

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ValidationError(VoxnavError):
    """Input parsed but violates a data invariant."""

    exit_code = EXIT_IO_FORMAT


class FormatError(VoxnavError):
    """A structured file violates its format contract."""

    exit_code = EXIT_IO_FORMAT


class ConfigError(VoxnavError):
    """Bad configuration key, value or command usage."""

    exit_code = EXIT_USAGE


class NotLocatedError(VoxnavError):
    """Query point lies outside every cluster."""

    exit_code = EXIT_NOT_LOCATED


class NoPathError(VoxnavError):
    """The two endpoints are not connected in the searched graph."""

    exit_code = EXIT_NO_PATH


class PipelineError(VoxnavError):
    """A build stage failed; message names the stage."""
