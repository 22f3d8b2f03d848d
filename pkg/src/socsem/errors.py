"""Exception hierarchy shared across the package.

Everything raised on purpose derives from :class:`SocsemError` so callers
(and the CLI) can tell data problems from numeric ones with two excepts.
"""

from __future__ import annotations

__all__ = [
    "SocsemError",
    "DataError",
    "ParseError",
    "ValidationError",
    "DegenerateDataError",
    "UnknownLabelError",
    "NumericError",
]


class SocsemError(Exception):
    """Base class for all errors raised by this package."""


class DataError(SocsemError):
    """Malformed, inconsistent, or contract-violating input data."""


class ParseError(DataError):
    """A text or binary source could not be decoded into records.

    Carries the 1-based ``line`` number when one is known.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(DataError):
    """An argument or constructed object violates a documented invariant."""


class DegenerateDataError(DataError):
    """The constant row/column cascade consumed the entire matrix."""


class UnknownLabelError(DataError):
    """A label was requested that the object does not contain."""

    def __init__(self, label: str):
        super().__init__(f"unknown label: {label!r}")
        self.label = label


class NumericError(SocsemError):
    """A quadratic form that must be positive came out zero or negative."""
