"""Exception taxonomy shared across the library.

CLI exit-code mapping: math-level failures (singular input, not a unit,
retries exhausted) exit 1, file/format problems exit 2, precondition
violations such as a too-small field exit 3.
"""

from __future__ import annotations


class FFLinalgError(Exception):
    """Base class for all library errors."""


class FieldMismatchError(FFLinalgError):
    """Operands belong to different prime fields."""


class DimensionMismatchError(FFLinalgError):
    """Matrix shapes are incompatible for the requested operation."""


class SingularMatrixError(FFLinalgError):
    """No nonzero pivot exists; carries a lower bound on the rank seen so far."""

    def __init__(self, message="matrix is singular", rank_hint=None):
        super().__init__(message)
        self.rank_hint = rank_hint


class NotStronglyRegularError(FFLinalgError):
    """A leading principal minor hit during Schur recursion is singular."""

    def __init__(self, level, size):
        super().__init__(
            f"singular leading minor at recursion level {level} (size {size})"
        )
        self.level = level
        self.size = size


class OperatorSingularError(FFLinalgError):
    """The displacement operator is not invertible for the given parameters."""


class FieldTooSmallError(FFLinalgError):
    """The field does not have enough elements for the probabilistic routine."""


class PreconditionFailureError(FFLinalgError):
    """Random preconditioning failed repeatedly; names the failing stage."""

    def __init__(self, stage, attempts):
        super().__init__(f"preconditioning failed after {attempts} attempts at stage: {stage}")
        self.stage = stage
        self.attempts = attempts


class SingularInputError(FFLinalgError):
    """The input matrix was verified to be singular."""


class RetriesExhaustedError(FFLinalgError):
    """The certification loop gave up after its retry budget."""

    def __init__(self, attempts):
        super().__init__(f"rank certification did not converge in {attempts} attempts")
        self.attempts = attempts


class NotAUnitError(FFLinalgError):
    """The group-ring element has a singular right-multiplication matrix."""


class FormatError(FFLinalgError):
    """A file or table did not parse under the declared text format."""
