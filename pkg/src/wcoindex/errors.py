"""Exception hierarchy shared by every layer of wco-index.

Each exception carries the process exit code the CLI maps it to:
1 for usage/configuration problems, 2 for data problems.
"""

from typing import Optional


class WcoError(Exception):
    """Root of all wco-index errors."""

    exit_code: int = 2


class PositionError(WcoError, IndexError):
    """A position or occurrence argument falls outside the structure."""


class OccurrenceNotFound(WcoError, LookupError):
    """`select` was asked for an occurrence beyond the last one."""


class ConfigurationError(WcoError, ValueError):
    """Invalid strategy, estimator, variant or configuration value."""

    exit_code = 1


class UnsupportedFeatureError(ConfigurationError):
    """The index was built without the structure an operation needs."""


class IngestError(WcoError, ValueError):
    """Malformed or out-of-range triple input."""

    def __init__(self, message: str, line_no: Optional[int] = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class QueryParseError(WcoError, ValueError):
    """Malformed query-file line."""

    def __init__(self, message: str, line_no: Optional[int] = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class IndexLoadError(WcoError):
    """A container could not be read back."""

    def __init__(self, message: str, section: Optional[str] = None):
        self.section = section
        if section is not None:
            message = f"section '{section}': {message}"
        super().__init__(message)


class VariantMismatchError(IndexLoadError):
    """The container holds a different index variant than requested."""
