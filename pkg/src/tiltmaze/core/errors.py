"""Package-wide exception types, mapped to CLI exit codes."""


class TiltmazeError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(TiltmazeError):
    """Invalid argument, configuration, or file content (CLI exit code 2)."""


class FileFormatError(ValidationError):
    """A persisted artifact failed to parse; message names the offending row."""


class MissingPrerequisiteError(TiltmazeError):
    """An upstream artifact is absent; message names the command that makes it
    (CLI exit code 3)."""
