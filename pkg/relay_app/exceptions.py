"""
Application-level errors and the exit codes they map to.
"""

from typing import Optional

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_SIMULATION = 2
EXIT_IO = 3


class ConfigError(Exception):
    """Base class for scenario configuration problems."""


class ConfigParseError(ConfigError):
    """The configuration text is not well-formed JSON."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class ConfigValidationError(ConfigError):
    """The configuration parses but names an invalid scenario."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        prefix = f"{field}: " if field else ""
        super().__init__(f"{prefix}{message}")


class UsageError(Exception):
    """Bad command-line arguments."""
