"""Good-set criterion and generating vector models."""

from typing import Dict, Optional, Tuple

from pydantic import Field, model_validator

from .base import BaseModel
from .primes import CrtResidues, PrimeBand
from .space import KorobovSpace

# Exponents alpha/lambda with a closed-form periodic zeta function
EXACT_EXPONENTS = (2, 4, 6)
EXPONENT_TOLERANCE = 1e-12


class GoodSetCriterion(BaseModel):
    """Membership test sum_{h.z = 0 mod p} r^{-1/lambda}(h) <= (factor/p) mu."""

    space: KorobovSpace = Field(..., description="Function space")
    lam: float = Field(..., gt=0, description="Exponent lambda in (0, alpha)")
    mu: float = Field(..., gt=0, description="Cached value of the full series mu")
    threshold_factor: float = Field(4.0, gt=0, description="Numerator of the per-prime threshold")

    @model_validator(mode="after")
    def validate_lambda(self) -> "GoodSetCriterion":
        if not self.lam < self.space.alpha:
            raise ValueError(f"lambda must lie in (0, alpha), got {self.lam}")
        return self

    @property
    def beta(self) -> float:
        """Series exponent alpha/lambda."""
        return self.space.alpha / self.lam

    @property
    def exact_exponent(self) -> Optional[int]:
        """beta as an integer when the closed-form dual sum applies."""
        rounded = round(self.beta)
        if rounded in EXACT_EXPONENTS and abs(self.beta - rounded) <= EXPONENT_TOLERANCE:
            return int(rounded)
        return None

    @property
    def exact(self) -> bool:
        return self.exact_exponent is not None

    def threshold(self, p: int) -> float:
        return self.threshold_factor * self.mu / p


class Certificate(BaseModel):
    """Achieved dual sum of a residue vector against its threshold."""

    value: float = Field(..., ge=0, description="Achieved dual sum (upper bound when truncated)")
    threshold: float = Field(..., gt=0, description="Threshold (4/p) mu")

    @property
    def is_good(self) -> bool:
        return self.value <= self.threshold


class GeneratingVector(BaseModel):
    """Residues z^(p) for every prime of a band, with optional good-set certificates."""

    band: PrimeBand = Field(..., description="Prime band the vector is defined on")
    residues: CrtResidues = Field(..., description="Residue vector per prime")
    certificates: Dict[int, Certificate] = Field(default_factory=dict, description="Certificate per prime")
    seed: Optional[int] = Field(None, description="Root seed of the construction")

    @model_validator(mode="after")
    def validate_domain(self) -> "GeneratingVector":
        if not self.residues.matches(self.band):
            raise ValueError("residue map domain differs from the band's primes")
        unknown = set(self.certificates) - set(self.band.primes)
        if unknown:
            raise ValueError(f"certificates for primes outside the band: {sorted(unknown)}")
        return self

    @property
    def dimension(self) -> int:
        return self.residues.dimension

    def residue(self, p: int) -> Tuple[int, ...]:
        return self.residues.residue(p)

    def is_certified(self) -> bool:
        """Whether every prime carries a passing certificate."""
        return len(self.certificates) == self.band.size and all(
            certificate.is_good for certificate in self.certificates.values()
        )
