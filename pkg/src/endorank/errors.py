"""Shared exception types.

Every error raised by this package derives from EndoRankError, so callers can
catch one type at the boundary.  Resource-limit errors (DegreeCapExceeded,
BudgetExceeded, SearchExhausted) are deliberately distinct from negative
mathematical answers: hitting a cap never means "no".
"""

from __future__ import annotations


class EndoRankError(Exception):
    """Base class for all package errors."""


class FieldConstructionError(EndoRankError):
    """Invalid field parameters: composite p, reducible modulus, cap overflow."""


class SpecMismatch(EndoRankError):
    """Operands belong to different ground fields."""


class ArityMismatch(EndoRankError):
    """Operands disagree on the number of variables (or an index is out of range)."""


class DivisionByZero(EndoRankError):
    """Field inversion of zero."""


class InfiniteField(EndoRankError):
    """Element enumeration requested over the rationals."""


class DegreeCapExceeded(EndoRankError):
    """A product or substitution produced a monomial above the degree cap."""


class BudgetExceeded(EndoRankError):
    """A basis computation ran out of reduction steps before finishing."""


class InvalidIndex(EndoRankError):
    """A matrix-position label lies outside 1..n."""


class JacobianUnavailable(EndoRankError):
    """The Jacobian probe was requested over a finite field, where vanishing
    derivatives (e.g. of p-th powers) make it meaningless."""


class NotABase(EndoRankError):
    """A polynomial tuple expected to generate the full algebra does not."""


class SearchExhausted(EndoRankError):
    """A substitution search ran out of candidates.

    Carries the full attempt log: a list of (record, outcome) pairs, one per
    candidate tried, so a caller can inspect why each candidate was rejected.
    """

    def __init__(self, message: str, attempts: list | None = None):
        super().__init__(message)
        self.attempts = attempts if attempts is not None else []


class RelationViolation(EndoRankError):
    """A composition table does not satisfy the required delta relations."""


class NoFixedPointFound(EndoRankError):
    """The fixed-point schedule was exhausted (ground field too small)."""


class ConstantTermSurvives(EndoRankError):
    """Translation by the found fixed point left a constant term behind."""


class NonAffineImage(EndoRankError):
    """A generator image that must be affine in a single generator is not."""


class ZeroScale(EndoRankError):
    """An affine generator image has zero leading scale (not invertible)."""


class GeneratorNotFound(EndoRankError):
    """No single-generator description of a rank-one image was found.

    This marks heuristic incompleteness, never a proof of non-existence.
    """


class PolySyntaxError(EndoRankError):
    """Malformed polynomial or file text.  Carries line/column when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {col}" if col is not None else "")
        super().__init__(message + where)
        self.line = line
        self.col = col


class UnknownVariable(PolySyntaxError):
    """A variable token outside the declared variables of the input."""


class CoefficientParseError(PolySyntaxError):
    """A coefficient literal that is invalid for the declared field."""
