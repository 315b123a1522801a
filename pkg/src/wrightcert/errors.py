"""Exception types shared across the package."""

from .interval import DomainError, ShapeError

__all__ = ["DomainError", "ShapeError", "CertificateError", "NumericalError", "ConvergenceError"]


class CertificateError(RuntimeError):
    """A rigorous check that a computation depends on did not pass."""


class NumericalError(RuntimeError):
    """Floating point linear algebra failed (singular matrix and the like)."""


class ConvergenceError(NumericalError):
    """Newton iteration did not reach the requested tolerance."""
