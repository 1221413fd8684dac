"""Exception types for numerical failures.

Invalid inputs raise plain ValueError; these classes mark failures of
the numerics themselves so callers (and the CLI exit codes) can tell
the two apart.
"""

from __future__ import annotations

__all__ = ["EigensolverError", "IllConditionedError", "NumericalError"]


class NumericalError(RuntimeError):
    """A numerical computation failed."""


class IllConditionedError(NumericalError):
    """The transition matrix is singular to working precision."""

    def __init__(self, message: str, cond_estimate: float):
        super().__init__(message)
        self.cond_estimate = cond_estimate


class EigensolverError(NumericalError):
    """The dense eigensolver did not converge."""
