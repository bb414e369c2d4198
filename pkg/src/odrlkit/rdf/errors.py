"""Exceptions raised while reading Turtle."""

from __future__ import annotations


class TurtleSyntaxError(SyntaxError):
    """A Turtle document could not be parsed.

    ``line`` and ``column`` are 1-based; ``excerpt`` is the offending source line.
    """

    def __init__(self, message: str, line: int, column: int, excerpt: str = "") -> None:
        super().__init__(message, ("<turtle>", line, column, excerpt))
        self.message = message
        self.line = line
        self.column = column
        self.excerpt = excerpt

    def __str__(self) -> str:
        text = f"{self.message} at line {self.line}, column {self.column}"
        if self.excerpt:
            text += f": {self.excerpt.strip()!r}"
        return text

    def __reduce__(self):
        return (type(self), (self.message, self.line, self.column, self.excerpt))


class UndefinedPrefix(TurtleSyntaxError):
    """A prefixed name used a label with no ``@prefix`` declaration."""

    def __init__(self, prefix: str, line: int, column: int, excerpt: str = "") -> None:
        super().__init__(f"undefined prefix {prefix!r}", line, column, excerpt)
        self.prefix = prefix

    def __reduce__(self):
        return (type(self), (self.prefix, self.line, self.column, self.excerpt))


def excerpt_at(text: str, line: int) -> str:
    lines = text.split("\n")
    if 1 <= line <= len(lines):
        return lines[line - 1].rstrip("\r")
    return ""
