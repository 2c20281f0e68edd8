"""Exception hierarchy shared by every module."""

from __future__ import annotations


class GoursatError(Exception):
    """Base class for domain errors (the CLI maps these to exit code 1)."""


class DimensionMismatch(GoursatError, ValueError):
    pass


class DenominatorVanishes(GoursatError, ZeroDivisionError):
    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"denominator vanishes in component {index}")


class GeneratorCapExceeded(GoursatError):
    pass


class DslSyntaxError(GoursatError, SyntaxError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{message} at line {line}, column {column}")
