"""Exception types raised by fracladder."""

from typing import Optional


class FracladderError(Exception):
    """Base class for all fracladder errors."""


class DomainError(FracladderError, ValueError):
    """An argument lies outside the domain an operation is defined on.

    Raised for Lévy indices outside (1, 2], mismatched operands, wrong
    representations and derivative orders out of range.
    """


class EvaluationError(FracladderError, ArithmeticError):
    """A pointwise evaluation hit a singular point (origin or node)."""

    def __init__(self, message: str, k: Optional[float] = None):
        super().__init__(message if k is None else f"{message} (k={k!r})")
        self.k = k


class EmptyCurveError(FracladderError):
    """Every sample of an energy curve fell inside an exclusion window."""


class ConfigError(FracladderError, ValueError):
    """Invalid run configuration or configuration file."""
