"""
Error hierarchy for DYAD.

Everything raised on purpose derives from DyadError so the CLI can map it to
exit code 3 with a one-line message. Outcomes that are answers (no solution,
undecided, no square root) are values, never exceptions.
"""

from __future__ import annotations

from typing import Optional


class DyadError(Exception):
    """Base class of every deliberate DYAD failure."""


class InternalInconsistency(DyadError, AssertionError):
    """A result failed its own exactness check. Always a bug."""


# ---------- Fields -----------------------------------------------------------

class FieldMismatch(DyadError, TypeError):
    pass


class DivisionByZero(DyadError, ZeroDivisionError):
    pass


class InfiniteField(DyadError, ValueError):
    pass


class NotPrime(DyadError, ValueError):
    pass


# ---------- Shapes -----------------------------------------------------------

class DimensionMismatch(DyadError, ValueError):
    pass


# ---------- Reduction / pencil -----------------------------------------------

class ZeroRhs(DyadError, ValueError):
    pass


class SingularTransform(DyadError, ValueError):
    pass


class NotReduced(DyadError, ValueError):
    pass


class SingularCompletion(DyadError, ValueError):
    pass


# ---------- Solvers ----------------------------------------------------------

class NotRankOne(DyadError, ValueError):
    pass


class BudgetExceeded(DyadError):
    def __init__(self, needed: int, budget: int, what: str = "evaluations"):
        super().__init__(f"{what} needed ({needed}) exceed the budget ({budget})")
        self.needed = needed
        self.budget = budget


class NotThreeCorner(DyadError, ValueError):
    pass


class SingularAfterSpecialization(InternalInconsistency):
    pass


class DependentMatrices(DyadError, ValueError):
    pass


# ---------- Files ------------------------------------------------------------

class ParseError(DyadError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)

    def at(self, line: int, column: Optional[int]) -> "ParseError":
        return ParseError(self.message, line, column)
