"""Korobov space quantities: decay function, norms and the mu series."""

import math
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
from pydantic import Field
from scipy import special

from ..shared.models import BaseModel, KorobovSpace, TrigPolynomial, WeightScheme
from ..shared.models.space import support
from ..shared.utils.exceptions import DivergentSeriesError, DomainError
from ..shared.utils.serialization import load_config_file
from ..shared.utils.validation import (
    validate_frequency,
    validate_integer,
    validate_lambda,
    validate_pydantic_model,
)

_EVEN_ZETA = {
    2: math.pi**2 / 6,
    4: math.pi**4 / 90,
    6: math.pi**6 / 945,
}


class SeriesValue(BaseModel):
    """A series value and a one-sided bound on the omitted remainder."""

    value: float = Field(..., ge=0, description="Computed (partial) sum")
    tail_bound: float = Field(0.0, ge=0, description="Upper bound on the omitted terms")
    box: Optional[int] = Field(None, description="Truncation radius, absent for closed forms")

    @property
    def upper(self) -> float:
        return self.value + self.tail_bound


def zeta(s: float) -> float:
    """Riemann zeta for real s > 1, exact closed forms at 2, 4 and 6."""
    if not s > 1:
        raise DivergentSeriesError(f"zeta({s}) diverges, need s > 1")
    rounded = round(s)
    if rounded in _EVEN_ZETA and abs(s - rounded) <= 1e-12:
        return _EVEN_ZETA[rounded]
    return float(special.zeta(s, 1))


def partial_zeta(s: float, limit: int) -> float:
    """sum_{h=1}^{limit} h^{-s}, smallest terms first."""
    if limit < 1:
        return 0.0
    h = np.arange(limit, 0, -1, dtype=float)
    return float(np.sum(h**-s))


def zeta_tail_bound(s: float, limit: int) -> float:
    """Integral bound sum_{h>limit} h^{-s} <= limit^{1-s}/(s-1)."""
    if not s > 1:
        raise DivergentSeriesError(f"series with exponent {s} diverges")
    return limit ** (1.0 - s) / (s - 1.0)


def series_exponent(space: KorobovSpace, lam: float) -> float:
    """beta = alpha/lambda after validating lambda."""
    validate_lambda(lam, space.alpha)
    beta = space.alpha / lam
    if not beta > 1:
        raise DivergentSeriesError(f"alpha/lambda = {beta} <= 1, the series diverges")
    return beta


def weighted_subset_sum(space: KorobovSpace, lam: float, factors: np.ndarray) -> np.ndarray:
    """sum over nonempty u of gamma_u^{1/lambda} prod_{j in u} f_j.

    ``factors`` has shape (..., d); the sum is taken along the last axis. Product
    weights give prod_j(1 + gamma_j^{1/lambda} f_j) - 1; explicit overrides are
    added as corrections on their subsets.
    """
    factors = np.asarray(factors, dtype=float)
    if factors.shape[-1] != space.dimension:
        raise DomainError(f"factor array has {factors.shape[-1]} coordinates, expected {space.dimension}")
    scaled = space.gamma_vector() ** (1.0 / lam)
    total = np.prod(1.0 + scaled * factors, axis=-1) - 1.0
    for subset, gamma in space.weights.overrides(space.dimension):
        columns = [j - 1 for j in subset]
        correction = gamma ** (1.0 / lam) - float(np.prod(scaled[columns]))
        total = total + correction * np.prod(factors[..., columns], axis=-1)
    return total


def r_value(space: KorobovSpace, h: Sequence[int]) -> float:
    """
    Decay r(h) = gamma_{supp(h)}^{-1} prod_{j in supp(h)} |h_j|^alpha.

    Raises:
        ContractViolationError: If h does not have length d
    """
    h = validate_frequency(h, space.dimension)
    u = support(h)
    magnitude = math.prod(abs(h[j - 1]) for j in u)
    return float(magnitude) ** space.alpha / space.weight(u)


def r_values(space: KorobovSpace, frequencies: np.ndarray) -> np.ndarray:
    """r(h) for each row of an (N, d) integer array."""
    frequencies = np.asarray(frequencies, dtype=np.int64)
    magnitudes = np.abs(frequencies).astype(float)
    nonzero = magnitudes > 0
    decay = np.prod(np.where(nonzero, magnitudes, 1.0) ** space.alpha, axis=1)
    # gamma per row from the support pattern; at most 2^d distinct patterns
    bits = nonzero @ (1 << np.arange(space.dimension))
    gamma = np.ones(len(frequencies))
    for pattern in np.unique(bits):
        if pattern == 0:
            continue
        u = tuple(j + 1 for j in range(space.dimension) if pattern >> j & 1)
        gamma[bits == pattern] = space.weight(u)
    return decay / gamma


def mu_value(
    space: KorobovSpace,
    lam: float,
    mode: str = "closed_form",
    box: Optional[int] = None,
) -> SeriesValue:
    """
    The series mu = sum_{h != 0} r^{-1/lambda}(h).

    Args:
        space: Function space
        lam: Exponent lambda in (0, alpha)
        mode: "closed_form" or "truncated"
        box: Radius H of the truncation box |h_j| <= H

    Returns:
        SeriesValue; truncated sums carry a bound on the omitted terms

    Raises:
        DomainError: If lambda lies outside (0, alpha) or H < 1
        DivergentSeriesError: If alpha/lambda <= 1
    """
    beta = series_exponent(space, lam)
    ones = np.ones(space.dimension)
    if mode == "closed_form":
        value = weighted_subset_sum(space, lam, 2.0 * zeta(beta) * ones)
        return SeriesValue(value=float(value))
    if mode != "truncated":
        raise DomainError(f"unknown mu mode {mode!r}")
    if box is None:
        raise DomainError("truncated mode needs a box radius")
    validate_integer(box, "H", minimum=1)
    head = 2.0 * partial_zeta(beta, box)
    value = float(weighted_subset_sum(space, lam, head * ones))
    upper = float(weighted_subset_sum(space, lam, (head + 2.0 * zeta_tail_bound(beta, box)) * ones))
    return SeriesValue(value=value, tail_bound=max(upper - value, 0.0), box=box)


def norm_squared(space: KorobovSpace, f: TrigPolynomial) -> float:
    """sum_h |f^(h)|^2 r^2(h) over the finite support of f."""
    return float(sum(abs(c) ** 2 * r_value(space, h) ** 2 for h, c in zip(f.modes, f.coefficients)))


def space_from_mapping(data: Dict[str, Any]) -> KorobovSpace:
    """
    Build a space from configuration keys ``alpha``, ``d`` and ``weights.*``.

    Raises:
        ValidationError: If the configuration is invalid
    """
    weights = data.get("weights", {}) or {}
    weight_data = {key: value for key, value in weights.items() if value is not None}
    if "product" in weight_data:
        weight_data["product"] = tuple(weight_data["product"])
    scheme = validate_pydantic_model(WeightScheme, weight_data)
    return validate_pydantic_model(
        KorobovSpace,
        {"alpha": data.get("alpha"), "dimension": data.get("d", data.get("dimension")), "weights": scheme},
    )


def load_space(path: Union[str, Path]) -> KorobovSpace:
    """Read a space from a configuration file."""
    return space_from_mapping(load_config_file(path))
