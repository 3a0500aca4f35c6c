"""Prime band and residue map models."""

import math
from typing import Dict, Tuple

from pydantic import Field, field_validator, model_validator

from .base import BaseModel
from ..utils.validation import band_primes


class PrimeBand(BaseModel):
    """All primes p with n/2 < p <= n, in ascending order."""

    n: int = Field(..., ge=2, description="Band parameter n")
    primes: Tuple[int, ...] = Field(..., min_length=1, description="Ascending primes in (n/2, n]")

    @model_validator(mode="after")
    def validate_primes(self) -> "PrimeBand":
        if list(self.primes) != sorted(set(self.primes)):
            raise ValueError("primes must be strictly ascending")
        expected = band_primes(self.n)
        members = set(expected)
        for p in self.primes:
            if p not in members:
                raise ValueError(f"{p} is not a prime in ({self.n}/2, {self.n}]")
        if len(self.primes) != len(expected):
            missing = sorted(members - set(self.primes))
            raise ValueError(f"band of n={self.n} is missing primes {missing}")
        return self

    @property
    def size(self) -> int:
        """L = |P_n|."""
        return len(self.primes)

    @property
    def modulus(self) -> int:
        """N, the product of all band primes."""
        return math.prod(self.primes)

    def __contains__(self, p: int) -> bool:
        return p in self.primes


class CrtResidues(BaseModel):
    """Per-prime residue vectors z^(p) in Z_p^d."""

    per_prime: Dict[int, Tuple[int, ...]] = Field(..., min_length=1, description="Map p -> residue vector")

    @field_validator("per_prime")
    @classmethod
    def validate_residues(cls, value: Dict[int, Tuple[int, ...]]) -> Dict[int, Tuple[int, ...]]:
        dimensions = {len(z) for z in value.values()}
        if len(dimensions) != 1 or 0 in dimensions:
            raise ValueError("all residue vectors must share one positive dimension")
        for p, z in value.items():
            if p < 2:
                raise ValueError(f"modulus {p} must be >= 2")
            if any(not 0 <= component < p for component in z):
                raise ValueError(f"residue vector {z} has components outside [0, {p})")
        return dict(sorted(value.items()))

    @property
    def dimension(self) -> int:
        return len(next(iter(self.per_prime.values())))

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(self.per_prime)

    def residue(self, p: int) -> Tuple[int, ...]:
        return self.per_prime[p]

    def matches(self, band: PrimeBand) -> bool:
        """Whether the domain of the map is exactly the band's prime list."""
        return self.primes == band.primes
