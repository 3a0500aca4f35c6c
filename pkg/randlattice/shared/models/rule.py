"""Randomized rule and integrand models."""

from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np
from pydantic import Field, field_validator

from .base import BaseModel
from .space import TrigPolynomial


class IntegrandKind(str, Enum):
    """Origin of an integrand."""
    TRIG_POLYNOMIAL = "trig_polynomial"
    CLOSED_FORM_FAMILY = "closed_form_family"
    EXTERNAL = "external"


class RandomRuleDraw(BaseModel):
    """One realisation (p, shift) of the randomized lattice rule."""

    p: int = Field(..., ge=2, description="Sampled prime")
    shift: Optional[Tuple[float, ...]] = Field(None, description="Shift in [0,1)^d, absent for the shiftless rule")
    seed_trace: Tuple[int, ...] = Field(default_factory=tuple, description="Root seed and substream key used")

    @field_validator("shift")
    @classmethod
    def validate_shift(cls, value: Optional[Tuple[float, ...]]) -> Optional[Tuple[float, ...]]:
        if value is not None and any(not 0.0 <= component < 1.0 for component in value):
            raise ValueError("shift components must lie in [0, 1)")
        return value


class Integrand(BaseModel):
    """A function on [0,1)^d evaluated row-wise on (N, d) point arrays."""

    name: str = Field(..., description="Human-readable name")
    dimension: int = Field(..., ge=1, description="Number of variables")
    evaluate: Callable[[np.ndarray], np.ndarray] = Field(..., description="Vectorized evaluation on (N, d) arrays")
    known_integral: Optional[complex] = Field(None, description="Exact integral over the unit cube, if known")
    kind: IntegrandKind = Field(IntegrandKind.EXTERNAL, description="Origin of the integrand")
    polynomial: Optional[TrigPolynomial] = Field(None, description="Fourier expansion for trig polynomials")

    @field_validator("known_integral", mode="before")
    @classmethod
    def coerce_integral(cls, value):
        return None if value is None else complex(value)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.evaluate(points)
