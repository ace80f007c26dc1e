"""Exception hierarchy shared by all confinv modules.

Every failure path raises one of these, so callers (and the CLI) can map any
domain problem to a stable name.
"""

from __future__ import annotations


class ConfinvError(Exception):
    """Base class for all domain errors raised by this package."""


# --- jet arithmetic ---


class DimensionMismatch(ConfinvError):
    pass


class BackendMismatch(ConfinvError):
    pass


class ZeroConstantTerm(ConfinvError):
    pass


class NonPositiveConstantTerm(ConfinvError):
    pass


class OrderTooLow(ConfinvError):
    pass


class NonzeroConstantTerm(ConfinvError):
    pass


class ArityMismatch(ConfinvError):
    pass


# --- parsing / metric files ---


class ParseError(ConfinvError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SignatureMismatch(ConfinvError):
    pass


class ArityError(ConfinvError):
    pass


class DivisionByZeroAtBasepoint(ConfinvError):
    pass


class NotInvertibleMetric(ConfinvError):
    pass


# --- tensor pipeline ---


class DimensionTooSmall(ConfinvError):
    pass


class WrongDimension(ConfinvError):
    pass


class RankMismatch(ConfinvError):
    pass


class SingularJacobian(ConfinvError):
    pass


# --- spectral / frame stage ---


class DegenerateStructure(ConfinvError):
    pass


class NonSimpleSpectrum(ConfinvError):
    pass


class NullEigenform(ConfinvError):
    pass


class NoSimpleWordOperator(ConfinvError):
    pass


class NonSplittable(ConfinvError):
    pass


class WrongSignature(ConfinvError):
    pass


# --- sampling-based verification ---


class DegenerateSample(ConfinvError):
    pass


class BackendPromotionWarning(UserWarning):
    """Emitted when an exact computation has to continue in floats.

    Happens when a fractional power or a transcendental function is applied
    at a basepoint where the exact result would be irrational.
    """
