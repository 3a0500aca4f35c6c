"""Validation utilities for randlattice services."""

import math
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from .exceptions import ContractViolationError, DomainError, ValidationError


def is_prime(value: int) -> bool:
    """Trial-division primality test for small integers."""
    if value < 2:
        return False
    if value < 4:
        return True
    if value % 2 == 0:
        return False
    for divisor in range(3, math.isqrt(value) + 1, 2):
        if value % divisor == 0:
            return False
    return True


def sieve(limit: int) -> np.ndarray:
    """Boolean primality table for 0..limit (sieve of Eratosthenes)."""
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags


def band_primes(n: int) -> Tuple[int, ...]:
    """Ascending primes in (n/2, n] read off the sieve table."""
    start = n // 2 + 1
    return tuple(int(p) for p in np.flatnonzero(sieve(n)[start:]) + start)


def validate_integer(value: int, name: str, minimum: Optional[int] = None) -> int:
    """
    Validate an integer argument.

    Args:
        value: The value to validate
        name: Argument name used in error messages
        minimum: Smallest admissible value, if any

    Returns:
        The validated integer

    Raises:
        DomainError: If the value is not an integer or is below the minimum
    """
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainError(f"{name} must be an integer, got {value!r}")

    if minimum is not None and value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")

    return value


def validate_prime(p: int) -> int:
    """
    Validate that p is a prime number.

    Raises:
        DomainError: If p is not prime
    """
    validate_integer(p, "p", minimum=2)
    if not is_prime(p):
        raise DomainError(f"p must be prime, got {p}")
    return p


def validate_lambda(lam: float, alpha: float) -> float:
    """
    Validate the exponent lambda of the good-set criterion.

    Args:
        lam: Exponent lambda
        alpha: Smoothness of the space

    Returns:
        The validated lambda as float

    Raises:
        DomainError: If lambda does not lie in (0, alpha)
    """
    if not isinstance(lam, (int, float)) or not math.isfinite(lam):
        raise DomainError(f"lambda must be a finite number, got {lam!r}")

    if not 0.0 < lam < alpha:
        raise DomainError(f"lambda must lie in (0, alpha) = (0, {alpha}), got {lam}")

    return float(lam)


def validate_frequency(h: Sequence[int], dimension: int) -> Tuple[int, ...]:
    """
    Validate a frequency vector against the dimension of a space.

    Raises:
        ContractViolationError: If the length does not match the dimension
    """
    h = tuple(int(component) for component in h)
    if len(h) != dimension:
        raise ContractViolationError(
            f"Frequency vector has length {len(h)}, space dimension is {dimension}"
        )
    return h


def validate_residue_vector(z: Sequence[int], p: int, dimension: Optional[int] = None) -> Tuple[int, ...]:
    """
    Validate a residue vector modulo p.

    Args:
        z: Residue vector
        p: Modulus
        dimension: Expected length, if known

    Returns:
        The residue vector as a tuple of ints

    Raises:
        ContractViolationError: If the length is wrong or a component lies outside [0, p)
    """
    z = tuple(int(component) for component in z)

    if dimension is not None and len(z) != dimension:
        raise ContractViolationError(f"Residue vector has length {len(z)}, expected {dimension}")

    for component in z:
        if not 0 <= component < p:
            raise ContractViolationError(f"Residue component {component} outside [0, {p})")

    return z


def validate_shift(shift: Sequence[float], dimension: int) -> Tuple[float, ...]:
    """
    Validate a shift vector in [0, 1)^d.

    Raises:
        ContractViolationError: If the length is wrong or a component lies outside [0, 1)
    """
    shift = tuple(float(component) for component in shift)
    if len(shift) != dimension:
        raise ContractViolationError(f"Shift has length {len(shift)}, expected {dimension}")

    for component in shift:
        if not 0.0 <= component < 1.0:
            raise ContractViolationError(f"Shift component {component} outside [0, 1)")

    return shift


def validate_pydantic_model(model_class, data: dict) -> object:
    """
    Validate data against a Pydantic model.

    Args:
        model_class: The Pydantic model class
        data: The data to validate

    Returns:
        The validated model instance

    Raises:
        ValidationError: If validation fails
    """
    try:
        return model_class(**data)
    except PydanticValidationError as e:
        error_messages = []
        for error in e.errors():
            field = " -> ".join(str(loc) for loc in error['loc'])
            message = error['msg']
            error_messages.append(f"{field}: {message}")

        raise ValidationError(f"Validation failed: {'; '.join(error_messages)}")
