"""Weighted Korobov space models."""

from enum import Enum
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import Field, field_validator, model_validator

from .base import BaseModel

# Integer frequency h in Z^d; zero components allowed.
FrequencyVector = Tuple[int, ...]


def support(h: Sequence[int]) -> Tuple[int, ...]:
    """1-based coordinates j with h_j != 0."""
    return tuple(j + 1 for j, component in enumerate(h) if component != 0)


def canonical_frequency(h: Sequence[int]) -> FrequencyVector:
    """Representative of {h, -h} whose first nonzero component is positive."""
    h = tuple(int(component) for component in h)
    for component in h:
        if component != 0:
            return h if component > 0 else tuple(-c for c in h)
    return h


class WeightKind(str, Enum):
    """How subset weights gamma_u are defined."""
    PRODUCT = "product"
    EXPLICIT = "explicit"


class WeightScheme(BaseModel):
    """Coordinate weights gamma_j and optional per-subset overrides gamma_u.

    Coordinates beyond the listed product weights reuse the last listed value,
    or decay like ``gamma_last * (m / j) ** decay`` when ``decay`` is set.
    """

    kind: WeightKind = Field(WeightKind.PRODUCT, description="Weight scheme kind")
    product: Tuple[float, ...] = Field((1.0,), min_length=1, description="Coordinate weights gamma_1, gamma_2, ...")
    decay: Optional[float] = Field(None, gt=0, description="Power decay for unlisted coordinates")
    explicit: Dict[Tuple[int, ...], float] = Field(
        default_factory=dict, description="Subset weights overriding the product rule"
    )

    @field_validator("product")
    @classmethod
    def validate_product(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        """Ensure coordinate weights are positive."""
        if any(not gamma > 0 for gamma in value):
            raise ValueError("product weights must be strictly positive")
        return value

    @field_validator("explicit", mode="before")
    @classmethod
    def parse_explicit_keys(cls, value):
        """Accept "1,2"-style string keys as used in configuration files."""
        if not isinstance(value, dict):
            return value
        parsed = {}
        for key, gamma in value.items():
            if isinstance(key, str):
                key = tuple(int(part) for part in key.replace(" ", "").split(",") if part)
            parsed[tuple(key)] = gamma
        return parsed

    @field_validator("explicit")
    @classmethod
    def validate_explicit(cls, value: Dict[Tuple[int, ...], float]) -> Dict[Tuple[int, ...], float]:
        """Subsets must be nonempty, strictly increasing, 1-based; weights positive."""
        for subset, gamma in value.items():
            if not subset or subset[0] < 1 or list(subset) != sorted(set(subset)):
                raise ValueError(f"invalid coordinate subset {subset}")
            if not gamma > 0:
                raise ValueError(f"weight of subset {subset} must be strictly positive")
        return value

    @model_validator(mode="after")
    def validate_kind(self) -> "WeightScheme":
        if self.explicit and self.kind != WeightKind.EXPLICIT:
            raise ValueError("explicit subset weights require kind='explicit'")
        return self

    @property
    def is_product(self) -> bool:
        return self.kind == WeightKind.PRODUCT or not self.explicit

    def coordinate_weight(self, j: int) -> float:
        """Weight gamma_j of the 1-based coordinate j."""
        if j < 1:
            raise ValueError(f"coordinates are 1-based, got {j}")
        listed = len(self.product)
        if j <= listed:
            return self.product[j - 1]
        if self.decay is None:
            return self.product[-1]
        return self.product[-1] * (listed / j) ** self.decay

    def coordinate_weights(self, dimension: int) -> np.ndarray:
        return np.array([self.coordinate_weight(j) for j in range(1, dimension + 1)], dtype=float)

    def subset_weight(self, subset: Sequence[int]) -> float:
        """gamma_u for a 1-based coordinate subset u; gamma of the empty set is 1."""
        subset = tuple(sorted(subset))
        if not subset:
            return 1.0
        if subset in self.explicit:
            return self.explicit[subset]
        return float(np.prod([self.coordinate_weight(j) for j in subset]))

    def overrides(self, dimension: int) -> List[Tuple[Tuple[int, ...], float]]:
        """Explicit overrides that concern coordinates 1..dimension."""
        return [
            (subset, gamma)
            for subset, gamma in sorted(self.explicit.items())
            if subset[-1] <= dimension
        ]


class KorobovSpace(BaseModel):
    """Weighted Korobov space of smoothness alpha in dimension d."""

    alpha: float = Field(..., gt=0, description="Smoothness exponent")
    dimension: int = Field(..., ge=1, description="Dimension d")
    weights: WeightScheme = Field(default_factory=WeightScheme, description="Weight scheme")

    def weight(self, subset: Sequence[int]) -> float:
        return self.weights.subset_weight(subset)

    def gamma_vector(self) -> np.ndarray:
        """Coordinate weights gamma_1..gamma_d."""
        return self.weights.coordinate_weights(self.dimension)

    def subsets(self, max_size: Optional[int] = None):
        """Nonempty 1-based coordinate subsets in size-then-lexicographic order."""
        top = self.dimension if max_size is None else min(max_size, self.dimension)
        for size in range(1, top + 1):
            yield from combinations(range(1, self.dimension + 1), size)

    def max_subset_weight(self) -> float:
        """max over nonempty u of gamma_u."""
        gammas = self.gamma_vector()
        above_one = gammas[gammas > 1.0]
        best = float(np.prod(above_one)) if above_one.size else float(gammas.max())
        for subset, gamma in self.weights.overrides(self.dimension):
            best = max(best, gamma)
        return best


class TrigPolynomial(BaseModel):
    """Finite Fourier expansion f(x) = sum_h c_h exp(2 pi i h.x)."""

    modes: Tuple[FrequencyVector, ...] = Field(..., min_length=1, description="Frequencies with nonzero coefficient")
    coefficients: Tuple[complex, ...] = Field(..., min_length=1, description="Fourier coefficients, aligned with modes")

    @field_validator("coefficients", mode="before")
    @classmethod
    def coerce_coefficients(cls, value):
        return tuple(complex(c) for c in value)

    @model_validator(mode="after")
    def validate_modes(self) -> "TrigPolynomial":
        if len(self.modes) != len(self.coefficients):
            raise ValueError("modes and coefficients must have the same length")
        dimensions = {len(h) for h in self.modes}
        if len(dimensions) != 1 or 0 in dimensions:
            raise ValueError("all modes must share one positive dimension")
        if len(set(self.modes)) != len(self.modes):
            raise ValueError("modes must be distinct")
        return self

    @classmethod
    def from_mapping(cls, coefficients: Dict[Sequence[int], complex]) -> "TrigPolynomial":
        """Build from {h: c}, summing duplicates and dropping zero coefficients."""
        merged: Dict[FrequencyVector, complex] = {}
        for h, c in coefficients.items():
            key = tuple(int(component) for component in h)
            merged[key] = merged.get(key, 0j) + complex(c)
        kept = {h: c for h, c in merged.items() if c != 0}
        if not kept:
            dimension = len(next(iter(merged)))
            kept = {(0,) * dimension: 0j}
        modes = tuple(sorted(kept))
        return cls(modes=modes, coefficients=tuple(kept[h] for h in modes))

    @property
    def dimension(self) -> int:
        return len(self.modes[0])

    def coefficient(self, h: Sequence[int]) -> complex:
        key = tuple(int(component) for component in h)
        for mode, c in zip(self.modes, self.coefficients):
            if mode == key:
                return c
        return 0j

    def integral(self) -> complex:
        """I_d(f), the zero-frequency coefficient."""
        return self.coefficient((0,) * self.dimension)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at the rows of an (N, d) array of points."""
        points = np.atleast_2d(np.asarray(x, dtype=float))
        frequencies = np.asarray(self.modes, dtype=float)
        phases = 2.0 * np.pi * (points @ frequencies.T)
        return np.exp(1j * phases) @ np.asarray(self.coefficients, dtype=complex)
