"""Parameter and diagnostic models for the randomized-error bounds."""

import math
from typing import List, Optional

from pydantic import Field

from .base import BaseModel


class BoundParams(BaseModel):
    """Parameters of the randomized-error upper bound."""

    n: int = Field(..., ge=2, description="Band parameter n")
    lam: float = Field(..., gt=0, description="Exponent lambda")
    r: int = Field(..., ge=1, description="Moment order r")
    mu: float = Field(..., gt=0, description="Series value mu")
    alpha: Optional[float] = Field(None, gt=0, description="Smoothness, checked against lambda when given")
    c1: float = Field(0.4, gt=0, description="Lower prime counting constant")
    c2: float = Field(0.6, gt=0, description="Upper prime counting constant")
    c3: float = Field(0.792, gt=0, description="Bell number bound constant")

    def violations(self) -> List[str]:
        """Violated preconditions, empty when the bound applies."""
        problems = []
        if self.alpha is not None and not self.lam < self.alpha:
            problems.append(f"lambda < alpha ({self.lam} >= {self.alpha})")
        if self.r * 2 * self.lam < 1:
            problems.append(f"r >= 1/(2 lambda) ({self.r} < {1 / (2 * self.lam)})")
        if self.n < math.exp(6 * self.c2):
            problems.append(f"n >= exp(6 C2) ({self.n} < {math.exp(6 * self.c2)})")
        if not self.c1 < 0.5 < self.c2:
            problems.append(f"C1 < 0.5 < C2 (C1={self.c1}, C2={self.c2})")
        return problems


class ChainTerms(BaseModel):
    """Successive terms of the moment chain bounding E[omega^r]."""

    n: int
    r: int
    band_size: int
    exact_sum: float = Field(..., description="sum_m m! C(L,m) S(r,m) (6/n)^m")
    stirling_sum: float = Field(..., description="sum_m S(r,m) (6 L/n)^m")
    touchard_value: float = Field(..., description="T_r(6 C2 / ln n)")
    bell_value: int = Field(..., description="B_r")
    bell_bound: float = Field(..., description="(C3 r / ln(r+1))^r")

    def holds(self, rel_tol: float = 1e-12) -> bool:
        chain = (self.exact_sum, self.stirling_sum, self.touchard_value, float(self.bell_value))
        return all(a <= b * (1 + rel_tol) for a, b in zip(chain, chain[1:]))


class TractabilityResult(BaseModel):
    """Partial products of the dimension-independent mu constant."""

    value: float = Field(..., description="Partial value at the last evaluated dimension")
    dimension: int = Field(..., ge=0, description="Last evaluated dimension")
    converged: bool = Field(..., description="Last increment below the Cauchy tolerance")
    diverged: bool = Field(..., description="Partial value exceeded the divergence ceiling")
