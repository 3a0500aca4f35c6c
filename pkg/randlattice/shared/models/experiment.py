"""Convergence experiment models."""

from typing import List, Optional, Tuple

from pydantic import Field, field_validator, model_validator

from .base import BaseModel
from .space import KorobovSpace


class ExperimentConfig(BaseModel):
    """Parameters of a convergence study over a grid of n."""

    space: KorobovSpace = Field(..., description="Function space")
    n_grid: Tuple[int, ...] = Field(..., min_length=1, description="Strictly increasing band parameters")
    seed: int = Field(..., ge=0, lt=2**64, description="Root seed")
    lam: Optional[float] = Field(None, gt=0, description="Exponent lambda, default alpha/2")
    eps: Optional[float] = Field(None, gt=0, description="Rate loss epsilon selecting lambda and r")
    repetitions: int = Field(0, ge=0, description="Empirical repetitions per row, 0 disables")
    box: Optional[int] = Field(None, ge=1, description="Box radius, hyperbolic cross when absent")
    adaptive: bool = Field(False, description="Double the box until certified")
    max_tries: int = Field(64, ge=1, description="Draws per prime in the construction")
    check_bounds: bool = Field(True, description="Abort when a certified row violates the lower bound")
    output: Optional[str] = Field(None, description="CSV output path")

    @field_validator("n_grid")
    @classmethod
    def validate_grid(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(n < 2 for n in value):
            raise ValueError("all n must be >= 2")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("n_grid must be strictly increasing")
        return value

    @model_validator(mode="after")
    def validate_selection(self) -> "ExperimentConfig":
        if self.lam is not None and self.eps is not None:
            raise ValueError("give either lam or eps, not both")
        if self.lam is not None and not self.lam < self.space.alpha:
            raise ValueError("lam must lie in (0, alpha)")
        return self


class ConvergenceRow(BaseModel):
    """One grid point of a convergence study."""

    n: int
    L: int
    rms_exact: float
    certified: bool
    h_star: str
    theorem1_bound: Optional[float]
    naive_bound: float
    lower_bound: Optional[float]
    empirical_rms: Optional[float]
    empirical_stderr: Optional[float]
    construction_seed: int


class SlopeFit(BaseModel):
    """Least-squares fit of ln(rms) against ln(n)."""

    slope: float
    intercept: float
    residual: float = Field(..., ge=0, description="Root mean squared residual")


class ConvergenceResult(BaseModel):
    """Rows of a convergence study and the fitted rate."""

    rows: List[ConvergenceRow]
    fit: Optional[SlopeFit] = None
    excluded: List[int] = Field(default_factory=list, description="n of uncertified rows left out of the fit")
