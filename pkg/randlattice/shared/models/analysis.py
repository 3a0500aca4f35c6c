"""Error analysis models."""

from fractions import Fraction
from typing import Dict, Optional, Sequence

from pydantic import Field, model_validator

from .base import BaseModel, Estimate
from .construct import GeneratingVector
from .primes import PrimeBand
from .space import FrequencyVector


class OmegaProfile(BaseModel):
    """Fraction omega(h) of band primes p with h.z = 0 (mod p)."""

    gv: GeneratingVector = Field(..., description="Generating vector")

    @property
    def band(self) -> PrimeBand:
        return self.gv.band

    def count(self, h: Sequence[int]) -> int:
        """Number of primes p whose dual lattice contains h."""
        hits = 0
        for p in self.band.primes:
            z = self.gv.residue(p)
            if sum(int(hj) * zj for hj, zj in zip(h, z)) % p == 0:
                hits += 1
        return hits

    def __call__(self, h: Sequence[int]) -> Fraction:
        return Fraction(self.count(h), self.band.size)


class ErrorReport(BaseModel):
    """Worst-case RMS error of the shifted randomized rule for one generating vector."""

    rms_exact: float = Field(..., ge=0, description="sup over searched h of sqrt(omega(h))/r(h)")
    maximizer: FrequencyVector = Field(..., description="Lexicographically smallest maximizing frequency h*")
    tail_bound: float = Field(..., ge=0, description="Upper bound for sqrt(omega)/r outside the searched region")
    certified: bool = Field(..., description="tail_bound < rms_exact, so rms_exact is the global supremum")
    method: str = Field(..., description="Search region: box or cross")
    box: Optional[int] = Field(None, description="Final box radius for the box method")
    threshold: Optional[float] = Field(None, description="Pruning level of the hyperbolic-cross search")
    empirical_rms: Optional[Estimate] = Field(None, description="Empirical RMS error on the extremal integrand")
    empirical_ran: Optional[Estimate] = Field(None, description="Empirical randomized error on the extremal integrand")
    bounds: Dict[str, float] = Field(default_factory=dict, description="Theoretical bounds attached to the report")

    @model_validator(mode="after")
    def validate_certification(self) -> "ErrorReport":
        if self.certified and not self.tail_bound < self.rms_exact:
            raise ValueError("a certified report needs tail_bound < rms_exact")
        return self

    def summary(self) -> str:
        """Single-line report."""
        h = ",".join(str(component) for component in self.maximizer)
        line = (
            f"rms={self.rms_exact!r} h*=({h}) tail={self.tail_bound!r} "
            f"certified={str(self.certified).lower()}"
        )
        for label, estimate in (("empirical_rms", self.empirical_rms), ("empirical_ran", self.empirical_ran)):
            if estimate is not None:
                line += f" {label}={estimate.value!r} {label}_stderr={estimate.stderr!r}"
        return line
