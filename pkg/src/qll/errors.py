"""Error types shared across the package."""
from __future__ import annotations


class QllError(Exception):
    pass


class UsageError(QllError, ValueError):
    """Bad arguments; exit code 2 on the command line."""


class ConfigError(QllError, ValueError):
    """Invalid configuration or input file; exit code 2 on the command line."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class SourceError(QllError, KeyError):
    """A coefficient was requested that the source cannot supply."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""
