"""Exception hierarchy shared by the grounder and solver front ends."""

from __future__ import annotations


class DCError(Exception):
    """Base class for all errors raised by this package."""


class DCSyntaxError(DCError):
    """A data, rule or theory file could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class EDBError(DCError):
    """Semantic problem in extensional data (arity clash, bad range)."""


class GroundError(DCError):
    """Failure while instantiating rules (for example arithmetic on text)."""


class TdcError(DCError):
    """Malformed or inconsistent ``.tdc`` theory file."""
