"""Exception hierarchy for randlattice services."""

from typing import Any, Dict, Optional


class RandLatticeException(Exception):
    """Base exception for all randlattice errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self) -> str:
        if not self.details:
            return self.message
        extra = ", ".join(f"{key}={value}" for key, value in self.details.items())
        return f"{self.message} ({extra})"


class ValidationError(RandLatticeException, ValueError):
    """Raised when input data or configuration fails validation."""


class ContractViolationError(RandLatticeException, ValueError):
    """Raised when arguments disagree with each other (dimension, prime band)."""


class DomainError(RandLatticeException, ValueError):
    """Raised when an argument lies outside its mathematical domain."""


class DivergentSeriesError(DomainError):
    """Raised when a series sum_h r^{-1/lambda}(h) diverges (alpha/lambda <= 1)."""


class UnsupportedExactModeError(RandLatticeException, ValueError):
    """Raised when the closed-form dual sum is requested for an unsupported exponent."""


class SearchFailureError(RandLatticeException, RuntimeError):
    """Raised when no good residue vector was found within the allowed draws."""

    def __init__(self, message: str, prime: int, tries: int):
        super().__init__(message, {"p": prime, "tries": tries})
        self.prime = prime
        self.tries = tries


class ProcessingError(RandLatticeException, RuntimeError):
    """Raised when integrand evaluation or file processing fails."""


class BoundViolationError(RandLatticeException, RuntimeError):
    """Raised when a certified error falls outside a proven bound."""
