"""Shared utilities for randlattice services."""

from .logging import setup_logging, get_logger, log_context
from .validation import validate_integer, validate_lambda, validate_prime, validate_pydantic_model
from .serialization import serialize_pydantic_model, deserialize_pydantic_model, serialize_report
from .streams import RandomStreams
from .exceptions import (
    RandLatticeException,
    ValidationError,
    ContractViolationError,
    DomainError,
    DivergentSeriesError,
    UnsupportedExactModeError,
    SearchFailureError,
    BoundViolationError,
    ProcessingError,
)

__all__ = [
    "setup_logging",
    "get_logger",
    "log_context",
    "validate_integer",
    "validate_lambda",
    "validate_prime",
    "validate_pydantic_model",
    "serialize_pydantic_model",
    "deserialize_pydantic_model",
    "serialize_report",
    "RandomStreams",
    "RandLatticeException",
    "ValidationError",
    "ContractViolationError",
    "DomainError",
    "DivergentSeriesError",
    "UnsupportedExactModeError",
    "SearchFailureError",
    "BoundViolationError",
    "ProcessingError",
]
