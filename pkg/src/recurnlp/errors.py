"""Exception hierarchy shared by every recurnlp module."""

from __future__ import annotations


class RecurNLPError(Exception):
    """Base class for data errors raised by recurnlp."""


class ParseError(RecurNLPError, ValueError):
    """Malformed input file. ``line`` is the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UndefinedInputError(RecurNLPError, ValueError):
    """A measure is undefined for the given input (e.g. an empty sequence)."""


class InsufficientDataError(RecurNLPError, ValueError):
    """Input too short for the requested computation."""


class ShapeError(RecurNLPError, ValueError):
    """Recurrence plots with mismatched dimensions were combined."""


class RangeError(RecurNLPError, ValueError):
    """An index or parameter lies outside its admissible range."""


class OutOfVocabularyError(RecurNLPError, KeyError):
    """A token has no embedding vector."""

    def __init__(self, token: str, position: int):
        self.token = token
        self.position = position
        super().__init__(f"token {token!r} at position {position} has no embedding")

    def __str__(self) -> str:
        return self.args[0]
