"""Shared exception types."""

from __future__ import annotations

__all__ = ["CapExceeded", "SpecError", "SingularMatrixError", "IntransitiveError"]


class CapExceeded(RuntimeError):
    """An exhaustive computation was refused because it exceeds a configured cap.

    Carries the estimated amount of work so callers can report why the
    request was refused instead of silently running forever.
    """

    def __init__(self, message: str, *, estimate: int | None = None,
                 limit: int | None = None):
        if estimate is not None:
            message = f"{message} (estimated work: {estimate}, limit: {limit})"
        super().__init__(message)
        self.estimate = estimate
        self.limit = limit


class SpecError(ValueError):
    """A cipher spec file (or inline table/matrix) failed validation.

    ``path`` locates the offending element, e.g. ``rounds[2].bricks[0]``.
    """

    def __init__(self, message: str, *, path: str = ""):
        if path:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path


class SingularMatrixError(SpecError):
    """A matrix that must be invertible over GF(2) is singular."""


class IntransitiveError(ValueError):
    """A generator set expected to be transitive is not."""
