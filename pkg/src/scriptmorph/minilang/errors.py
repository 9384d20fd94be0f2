"""Errors raised by the mini-language front end and runtime."""

from ..errors import ScriptMorphError


class MiniLangError(ScriptMorphError):
    """Base class for mini-language errors."""


class ScriptSyntaxError(MiniLangError):
    """Lexical or syntactic error, with source location.

    ``expected`` carries the token kinds the parser would have accepted at
    the point of failure (empty for lexical errors).
    """

    def __init__(self, message, line, col, expected=()):
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        detail = f"{message} at line {line}, column {col}"
        if self.expected:
            detail += " (expected " + " or ".join(self.expected) + ")"
        super().__init__(detail)


class InvalidProgramError(MiniLangError):
    """A hand-built opcode program violates structural invariants."""
