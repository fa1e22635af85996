"""Exception hierarchy.

Two families are kept apart so that callers (and the command line) can tell
misuse from numerical trouble:

* :class:`ValidationError` and its subclasses are raised for invalid input
  (bad parameters, grids that cannot represent the request).
* :class:`DiagnosticError` and its subclasses signal that a computation was
  attempted but produced a result that fails an internal consistency check.
"""

from __future__ import annotations


class ValidationError(ValueError):
    """Invalid parameters or configuration."""


class UnresolvedShift(ValidationError):
    """A travel-time shift does not fit in the time window of the grid."""


class OutOfWindow(ValidationError):
    """A requested time lies outside the sampled window."""


class DiagnosticError(ArithmeticError):
    """A numerical self-check failed."""


class ImaginaryLeakage(DiagnosticError):
    """An inverse transform that should be real has a large imaginary part."""


class BranchViolation(DiagnosticError):
    """A principal-branch argument jumps across the cut between samples."""


class DegenerateSignal(DiagnosticError):
    """A signal has (numerically) zero energy."""


class NonDecayingIntegrand(DiagnosticError):
    """A Hilbert-transform input grows in a way the tail model cannot handle."""


__all__ = [
    "BranchViolation",
    "DegenerateSignal",
    "DiagnosticError",
    "ImaginaryLeakage",
    "NonDecayingIntegrand",
    "OutOfWindow",
    "UnresolvedShift",
    "ValidationError",
]
