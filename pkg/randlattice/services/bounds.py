"""Partition counts, Bell-number estimates and the randomized-error upper bound."""

import itertools
import math
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

from ..shared.config import settings
from ..shared.models import BoundParams, ChainTerms, PrimeBand, TractabilityResult, WeightScheme
from ..shared.utils.exceptions import DomainError, ValidationError
from ..shared.utils.validation import validate_integer, validate_lambda
from .space import zeta

MAX_STIRLING_ORDER = 64
MAX_BELL_ORDER = 25
CAUCHY_TOLERANCE = 1e-12
DIVERGENCE_CEILING = 1e12


@lru_cache(maxsize=None)
def _stirling2(r: int, m: int) -> int:
    if r == m:
        return 1
    if m == 0 or m > r:
        return 0
    return m * _stirling2(r - 1, m) + _stirling2(r - 1, m - 1)


def stirling2(r: int, m: int) -> int:
    """
    Stirling number of the second kind S(r, m).

    Raises:
        DomainError: Outside 0 <= m <= r <= 64
    """
    validate_integer(r, "r", minimum=0)
    validate_integer(m, "m", minimum=0)
    if r > MAX_STIRLING_ORDER:
        raise DomainError(f"r must be <= {MAX_STIRLING_ORDER}, got {r}")
    if m > r:
        raise DomainError(f"need m <= r, got m={m}, r={r}")
    return _stirling2(r, m)


def labelled_partitions(r: int, m: int) -> int:
    """Number of ordered partitions of an r-set into m nonempty blocks, m! S(r, m)."""
    return math.factorial(m) * stirling2(r, m)


def labelled_partitions_by_compositions(r: int, m: int) -> int:
    """sum of r!/(l_1! ... l_m!) over compositions l_1 + ... + l_m = r with l_i >= 1."""
    validate_integer(r, "r", minimum=0)
    validate_integer(m, "m", minimum=0)
    if m == 0:
        return 1 if r == 0 else 0
    total = 0
    for cuts in itertools.combinations(range(1, r), m - 1):
        parts = np.diff((0, *cuts, r))
        total += math.factorial(r) // math.prod(math.factorial(int(part)) for part in parts)
    return total


def touchard(r: int, x: float) -> float:
    """Touchard polynomial T_r(x) = sum_k S(r, k) x^k."""
    return float(sum(stirling2(r, k) * x**k for k in range(r + 1)))


def bell(r: int) -> int:
    """
    Bell number B_r = T_r(1).

    Raises:
        DomainError: Outside 0 <= r <= 25
    """
    validate_integer(r, "r", minimum=0)
    if r > MAX_BELL_ORDER:
        raise DomainError(f"r must be <= {MAX_BELL_ORDER}, got {r}")
    return sum(stirling2(r, k) for k in range(r + 1))


def bell_bound(r: int, c3: Optional[float] = None) -> float:
    """(C3 r / ln(r+1))^r."""
    validate_integer(r, "r", minimum=1)
    c3 = settings.c3 if c3 is None else c3
    return (c3 * r / math.log(r + 1)) ** r


def bell_bound_holds(r: int, c3: Optional[float] = None) -> bool:
    return bell(r) < bell_bound(r, c3)


def theorem1_bound(params: BoundParams) -> float:
    """
    Upper bound on the worst-case RMS error achieved by some vector in G_n:
    n^{-lambda-(r-1)/(2r)} (C3 r ln n / (C1 ln(r+1)))^{1/2} (4 mu)^lambda.

    Raises:
        DomainError: Naming every violated precondition
    """
    problems = params.violations()
    if problems:
        raise DomainError("Bound preconditions violated: " + "; ".join(problems), {"n": params.n, "r": params.r})
    n, lam, r = params.n, params.lam, params.r
    rate = n ** -(lam + (r - 1) / (2 * r))
    log_factor = math.sqrt(params.c3 * r * math.log(n) / (params.c1 * math.log(r + 1)))
    return rate * log_factor * (4.0 * params.mu) ** lam


def select_parameters(alpha: float, eps: float) -> Tuple[float, int]:
    """
    lambda = alpha - eps/2 and the smallest integer r >= max(1/(2 lambda), 1/eps).

    Raises:
        DomainError: If eps is not in (0, 2 alpha)
    """
    if not 0 < eps < 2 * alpha:
        raise DomainError(f"eps must lie in (0, 2 alpha) = (0, {2 * alpha}), got {eps}")
    lam = alpha - eps / 2
    r = max(1, math.ceil(max(1 / (2 * lam), 1 / eps) - 1e-12))
    return lam, r


def smallest_order(lam: float) -> int:
    """Smallest integer r >= 1/(2 lambda)."""
    return max(1, math.ceil(1 / (2 * lam) - 1e-12))


def tractability_constant(weights: WeightScheme, alpha: float, lam: float, d_limit: int) -> TractabilityResult:
    """
    Partial products prod_{j<=d}(1 + 2 gamma_j^{1/lambda} zeta(alpha/lambda)) - 1 up to d_limit.

    Raises:
        ValidationError: For weights that are not product weights
    """
    if not weights.is_product:
        raise ValidationError("tractability is only checked for product weights")
    validate_lambda(lam, alpha)
    validate_integer(d_limit, "d_limit", minimum=0)
    factor = 2.0 * zeta(alpha / lam)
    product = 1.0
    increment = math.inf
    for j in range(1, d_limit + 1):
        previous = product
        product *= 1.0 + weights.coordinate_weight(j) ** (1.0 / lam) * factor
        increment = product - previous
        if product - 1.0 > DIVERGENCE_CEILING:
            return TractabilityResult(value=product - 1.0, dimension=j, converged=False, diverged=True)
        if increment < CAUCHY_TOLERANCE:
            return TractabilityResult(value=product - 1.0, dimension=j, converged=True, diverged=False)
    return TractabilityResult(value=product - 1.0, dimension=d_limit, converged=d_limit == 0, diverged=False)


def chain_terms(band: PrimeBand, r: int, c2: Optional[float] = None, c3: Optional[float] = None) -> ChainTerms:
    """Terms of sum_m m! C(L,m) S(r,m) (6/n)^m <= T_r(6L/n) <= T_r(6 C2/ln n) <= B_r."""
    c2 = settings.c2 if c2 is None else c2
    n, size = band.n, band.size
    exact_sum = sum(
        labelled_partitions(r, m) * math.comb(size, m) * (6.0 / n) ** m for m in range(1, min(r, size) + 1)
    )
    return ChainTerms(
        n=n,
        r=r,
        band_size=size,
        exact_sum=exact_sum,
        stirling_sum=touchard(r, 6.0 * size / n),
        touchard_value=touchard(r, 6.0 * c2 / math.log(n)),
        bell_value=bell(r),
        bell_bound=bell_bound(r, c3),
    )


def indicator_moment(indicators: Sequence[int], r: int) -> float:
    """((1/L) sum_p 1_p)^r expanded over ordered partitions of the r factors."""
    size = len(indicators)
    hits = int(sum(indicators))
    return sum(labelled_partitions(r, m) * math.comb(hits, m) for m in range(1, min(r, hits) + 1)) / size**r
