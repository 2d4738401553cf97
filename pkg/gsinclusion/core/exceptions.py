"""
Exceptions raised by gsinclusion.

All of them derive from ValueError so callers validating inputs keep a
single except clause.
"""

from typing import Optional


class HorizonError(ValueError):
    """A value was requested beyond the evaluation horizon of an object."""


class DimensionMismatchError(ValueError):
    """Objects of different dimension were combined."""

    def __init__(self, expected: int, got: int, what: str = "dimension"):
        super().__init__(f"{what} mismatch: expected {expected}, got {got}")
        self.expected = expected
        self.got = got


class SpecParseError(ValueError):
    """Malformed spec text, with the 1-based line and column of the problem."""

    def __init__(self, message: str, line: int = 1, column: int = 1, text: Optional[str] = None):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column
        self.text = text
