"""Errors raised while parsing and typechecking specifications."""

from __future__ import annotations


class SpecError(Exception):
    """Base class for all specification-language errors."""


class ParseError(SpecError):
    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        loc = f"line {line}, col {col}"
        if expected:
            message = f"{message} (expected one of: {', '.join(expected)})"
        super().__init__(f"{loc}: {message}")
        self.line = line
        self.col = col
        self.expected = expected


class SpecTypeError(SpecError):
    """Bool/Float mismatch or ill-formed construct found during typechecking."""


class UntimedWindowError(SpecTypeError):
    """A sliding window appears in a stream without a rate annotation."""


class CyclicDependencyError(SpecTypeError):
    def __init__(self, cycle: list[str]):
        super().__init__("cyclic stream dependency: " + " -> ".join(cycle + cycle[:1]))
        self.cycle = cycle
