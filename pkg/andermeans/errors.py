"""Exception types shared across the package."""

from __future__ import annotations

from pathlib import Path


class AndermeansError(Exception):
    """Root of all package errors."""


class InvalidInputError(AndermeansError, ValueError):
    """Shapes, labels or parameters that violate an operation's preconditions."""


class DataParseError(InvalidInputError):
    """A numeric matrix file could not be parsed."""

    def __init__(self, message: str, path: Path | str | None = None, line: int | None = None, column: int | None = None):
        self.path = Path(path) if path is not None else None
        self.line = line
        self.column = column
        location = []
        if self.path is not None:
            location.append(str(self.path))
        if line is not None:
            location.append(f"line {line}")
        if column is not None:
            location.append(f"column {column}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class InvariantViolation(AndermeansError, RuntimeError):
    """A solver invariant (monotone energy) failed at runtime."""
