"""
Defines the exceptions raised by the solver.

Every error derives from ConicalSolverError, which is itself a ValueError, so
callers can catch the whole family or a single failure mode.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from conical_lp_solver.cone_gen import Ray


class ConicalSolverError(ValueError):
    """Base class for all solver errors."""


class MalformedProblemError(ConicalSolverError):
    """
    Raised when a problem or problem file is malformed.

    Attributes:
        field: The name of the offending field.
    """

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


class DimensionTooLargeError(ConicalSolverError):
    """Raised when a brute-force routine is asked to exceed its size cap."""


class NotStrictlyTangentError(ConicalSolverError):
    """
    Raised when the range of a coefficient matrix meets the non-negative
    orthant outside the origin.

    Attributes:
        witness: A non-zero ray in the intersection.
    """

    def __init__(self, message: str, witness: Ray | None = None) -> None:
        super().__init__(message)
        self.witness = witness


class InfeasibleProblemError(ConicalSolverError):
    """Raised when an operation requires a feasible problem and it is not."""


class NumericalFailureError(ConicalSolverError):
    """Raised when a guaranteed property fails to hold numerically."""


class InconsistentSystemError(NumericalFailureError):
    """Raised when a linear system expected to be consistent is not."""


class NotPointedError(NumericalFailureError):
    """Raised when a cone expected to be pointed contains opposite rays."""


class ZeroBetaError(NumericalFailureError):
    """Raised when a ray calibrates to a zero ratio."""


class InconsistentRatiosError(NumericalFailureError):
    """Raised when the calibration ratios of a ray disagree."""


class IterationCapError(NumericalFailureError):
    """Raised when the evolutive search examines too many rays."""
