"""Good-set membership, residue search and generating vector assembly."""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import Field
from scipy import special

from ..shared.config import settings
from ..shared.models import (
    BaseModel,
    Certificate,
    CrtResidues,
    GeneratingVector,
    GoodSetCriterion,
    KorobovSpace,
    PrimeBand,
)
from ..shared.utils.exceptions import DomainError, SearchFailureError, UnsupportedExactModeError
from ..shared.utils.logging import get_logger
from ..shared.utils.streams import RandomStreams
from ..shared.utils.validation import (
    validate_integer,
    validate_lambda,
    validate_prime,
    validate_residue_vector,
)
from .space import mu_value, r_values, series_exponent, weighted_subset_sum, zeta

logger = get_logger(__name__)


class DualSum(BaseModel):
    """Dual lattice sum of one residue vector, possibly truncated."""

    value: float = Field(..., description="Sum over the (truncated) dual lattice")
    tail_bound: float = Field(0.0, ge=0, description="Bound on dual points outside the box")
    box: Optional[int] = Field(None, description="Box radius, absent for the exact sum")
    method: str = Field("exact", description="exact, residue or enumerate")

    @property
    def upper(self) -> float:
        return self.value + self.tail_bound


def make_criterion(space: KorobovSpace, lam: Optional[float] = None, threshold_factor: float = 4.0) -> GoodSetCriterion:
    """Criterion with cached mu; lambda defaults to alpha/2 (series exponent 2)."""
    lam = space.alpha / 2 if lam is None else validate_lambda(lam, space.alpha)
    mu = mu_value(space, lam).value
    return GoodSetCriterion(space=space, lam=lam, mu=mu, threshold_factor=threshold_factor)


def bernoulli_polynomial(order: int, x: np.ndarray) -> np.ndarray:
    """B_order(x) from the Bernoulli numbers."""
    numbers = special.bernoulli(order)
    coefficients = special.binom(order, np.arange(order + 1)) * numbers
    return np.polyval(coefficients, x)


def periodic_zeta(order: int, x: np.ndarray) -> np.ndarray:
    """sigma(x) = sum_{h != 0} exp(2 pi i h x)/|h|^order for even order, x in [0, 1)."""
    if order < 2 or order % 2:
        raise UnsupportedExactModeError(f"closed form needs an even exponent, got {order}")
    sign = (-1) ** (order // 2 + 1)
    scale = (2.0 * math.pi) ** order / math.factorial(order)
    return sign * scale * bernoulli_polynomial(order, np.asarray(x, dtype=float))


def _residue_table(z: Sequence[int], p: int) -> np.ndarray:
    """(p, d) array of k z_j mod p in exact integer arithmetic."""
    k = np.arange(p, dtype=np.int64)[:, None]
    return (k * (np.asarray(z, dtype=np.int64) % p)[None, :]) % p


def dual_sum_exact(z: Sequence[int], p: int, crit: GoodSetCriterion) -> DualSum:
    """
    Exact sum over h != 0 with h.z = 0 (mod p) of r^{-1/lambda}(h).

    Uses the character-sum identity with the periodic zeta function of the
    series exponent; subset overrides enter through weighted_subset_sum. Cost O(p d).

    Raises:
        UnsupportedExactModeError: If alpha/lambda is not 2, 4 or 6
    """
    validate_prime(p)
    z = validate_residue_vector(z, p, crit.space.dimension)
    order = crit.exact_exponent
    if order is None:
        raise UnsupportedExactModeError(
            f"alpha/lambda = {crit.beta} has no closed form, use dual_sum_truncated"
        )
    sigma = periodic_zeta(order, _residue_table(z, p) / p)
    value = float(np.mean(weighted_subset_sum(crit.space, crit.lam, sigma)))
    return DualSum(value=max(value, 0.0))


def _truncation_tail(z: Sequence[int], p: int, space: KorobovSpace, lam: float, box: int, beta: float) -> float:
    """Bound on dual points with some |h_j| > H.

    A point leaving the box along coordinate j lies, for fixed other components,
    in one residue class of h_j (all of Z when z_j = 0 mod p).
    """
    outside = np.empty(space.dimension)
    for j, component in enumerate(z):
        if component % p:
            outside[j] = 2.0 * ((box + 1.0) ** -beta + (box + 1.0) ** (1.0 - beta) / (p * (beta - 1.0)))
        else:
            outside[j] = 2.0 * box ** (1.0 - beta) / (beta - 1.0)
    full = 2.0 * zeta(beta)

    scaled = space.gamma_vector() ** (1.0 / lam)
    factors = 1.0 + scaled * full
    tail = 0.0
    for j in range(space.dimension):
        tail += scaled[j] * outside[j] * float(np.prod(np.delete(factors, j)))
    for subset, gamma in space.weights.overrides(space.dimension):
        columns = [j - 1 for j in subset]
        correction = gamma ** (1.0 / lam) - float(np.prod(scaled[columns]))
        tail += correction * sum(outside[j] * full ** (len(columns) - 1) for j in columns)
    return max(tail, 0.0)


def dual_sum_truncated(
    z: Sequence[int],
    p: int,
    space: KorobovSpace,
    lam: float,
    box: int,
    method: str = "residue",
) -> DualSum:
    """
    Dual lattice sum restricted to the box |h_j| <= H, with a tail bound.

    Args:
        z: Residue vector in Z_p^d
        p: Prime modulus
        space: Function space
        lam: Exponent lambda
        box: Box radius H
        method: "residue" groups |h_j| by residue class and evaluates the
            class sums with one FFT; "enumerate" visits every box point

    Raises:
        DomainError: If H < 1 or the method is unknown
        DivergentSeriesError: If alpha/lambda <= 1
    """
    validate_integer(box, "H", minimum=1)
    validate_prime(p)
    z = validate_residue_vector(z, p, space.dimension)
    beta = series_exponent(space, lam)

    if method == "residue":
        h = np.arange(1, box + 1, dtype=np.int64)
        class_weights = np.bincount(h % p, weights=h.astype(float) ** -beta, minlength=p)
        # two-sided sum over 1 <= |h| <= H of |h|^-beta exp(2 pi i h a / p)
        character_sums = 2.0 * p * np.real(np.fft.ifft(class_weights))
        factors = character_sums[_residue_table(z, p)]
        value = float(np.mean(weighted_subset_sum(space, lam, factors)))
    elif method == "enumerate":
        value = _enumerate_box(z, p, space, lam, box, beta)
    else:
        raise DomainError(f"unknown truncation method {method!r}")

    tail = _truncation_tail(z, p, space, lam, box, beta)
    return DualSum(value=max(value, 0.0), tail_bound=tail, box=box, method=method)


def _enumerate_box(z: Sequence[int], p: int, space: KorobovSpace, lam: float, box: int, beta: float) -> float:
    if (2 * box + 1) ** space.dimension > settings.max_search_candidates:
        raise DomainError("box too large for enumeration", {"H": box, "d": space.dimension})
    axis = np.arange(-box, box + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([axis] * space.dimension), indexing="ij"), axis=-1).reshape(-1, space.dimension)
    dual = (grid @ np.asarray(z, dtype=np.int64)) % p == 0
    grid = grid[dual & np.any(grid != 0, axis=1)]
    return float(np.sum(r_values(space, grid) ** (-1.0 / lam)))


def is_good(z: Sequence[int], p: int, crit: GoodSetCriterion, box: Optional[int] = None) -> Tuple[bool, float]:
    """
    Whether z belongs to the good set of p.

    The exact sum is used when available; otherwise the truncated sum plus its
    tail bound must clear the threshold, so a positive answer is certified.

    Returns:
        (membership, achieved sum or its certified upper bound)
    """
    if crit.exact:
        achieved = dual_sum_exact(z, p, crit).value
    else:
        box = settings.truncation_box if box is None else box
        achieved = dual_sum_truncated(z, p, crit.space, crit.lam, box).upper
    return achieved <= crit.threshold(p), achieved


def find_good_residue(
    p: int,
    crit: GoodSetCriterion,
    rng: np.random.Generator,
    max_tries: Optional[int] = None,
) -> Tuple[Tuple[int, ...], float]:
    """
    Draw z uniformly from Z_p^d until it is good.

    Raises:
        SearchFailureError: If max_tries draws all fail
    """
    max_tries = settings.max_search_tries if max_tries is None else max_tries
    validate_integer(max_tries, "max_tries", minimum=1)
    for attempt in range(1, max_tries + 1):
        z = tuple(int(component) for component in rng.integers(0, p, size=crit.space.dimension))
        good, achieved = is_good(z, p, crit)
        if good:
            logger.debug("Found good residue", p=p, attempt=attempt, achieved=achieved)
            return z, achieved
    raise SearchFailureError(f"No good residue vector for p={p} in {max_tries} draws", prime=p, tries=max_tries)


def build_generating_vector(
    band: PrimeBand,
    crit: GoodSetCriterion,
    seed: int,
    max_tries: Optional[int] = None,
    max_workers: Optional[int] = None,
) -> GeneratingVector:
    """
    Search a good residue for every prime of the band.

    Each prime draws from its own substream of the root seed, so serial and
    parallel runs produce the same vector.

    Raises:
        SearchFailureError: Naming the first prime whose search failed
    """
    streams = RandomStreams(seed)
    max_workers = settings.max_workers if max_workers is None else max_workers

    def search(p: int) -> Tuple[int, Tuple[int, ...], float]:
        z, achieved = find_good_residue(p, crit, streams.for_prime(p), max_tries)
        return p, z, achieved

    if max_workers is not None and max_workers > 1 and band.size > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            found = list(pool.map(search, band.primes))
    else:
        found = [search(p) for p in band.primes]

    residues = CrtResidues(per_prime={p: z for p, z, _ in found})
    certificates = {p: Certificate(value=achieved, threshold=crit.threshold(p)) for p, _, achieved in found}
    logger.info("Built generating vector", n=band.n, primes=band.size, seed=seed)
    return GeneratingVector(band=band, residues=residues, certificates=certificates, seed=seed)


def certify_residues(band: PrimeBand, per_prime: Dict[int, Sequence[int]], crit: Optional[GoodSetCriterion] = None) -> GeneratingVector:
    """Wrap given residues as a generating vector, certifying them when a criterion is given."""
    residues = CrtResidues(per_prime={p: tuple(int(c) % p for c in z) for p, z in per_prime.items()})
    certificates = {}
    if crit is not None:
        for p, z in residues.per_prime.items():
            _, achieved = is_good(z, p, crit)
            certificates[p] = Certificate(value=achieved, threshold=crit.threshold(p))
    return GeneratingVector(band=band, residues=residues, certificates=certificates)


def constant_vector(band: PrimeBand, z: Sequence[int], crit: Optional[GoodSetCriterion] = None) -> GeneratingVector:
    """Generating vector with the same integer vector z reduced modulo every prime."""
    return certify_residues(band, {p: z for p in band.primes}, crit)


def _all_residues(p: int, dimension: int) -> np.ndarray:
    if p**dimension > settings.exhaustive_search_limit:
        raise DomainError(
            "exhaustive search too large", {"p": p, "d": dimension, "limit": settings.exhaustive_search_limit}
        )
    return np.array(list(itertools.product(range(p), repeat=dimension)), dtype=np.int64)


def good_set(p: int, crit: GoodSetCriterion) -> List[Tuple[int, ...]]:
    """All good residue vectors of p in lexicographic order (p^d <= exhaustive limit)."""
    return [tuple(int(c) for c in z) for z in _all_residues(p, crit.space.dimension) if is_good(z, p, crit)[0]]


def exhaustive_good_residue(p: int, crit: GoodSetCriterion) -> Tuple[Tuple[int, ...], float]:
    """Good residue with the smallest achieved sum, ties to the lexicographically first."""
    best = None
    for z in _all_residues(p, crit.space.dimension):
        good, achieved = is_good(z, p, crit)
        if good and (best is None or achieved < best[1]):
            best = (tuple(int(c) for c in z), achieved)
    if best is None:
        raise SearchFailureError(f"Good set of p={p} is empty", prime=p, tries=p**crit.space.dimension)
    return best


def average_dual_sum(p: int, crit: GoodSetCriterion) -> float:
    """Mean dual sum over all of Z_p^d; at most (2/p) mu."""
    sums = [
        dual_sum_exact(z, p, crit).value if crit.exact else is_good(z, p, crit)[1]
        for z in _all_residues(p, crit.space.dimension)
    ]
    return float(np.mean(sums))


def dual_fraction(h: Sequence[int], p: int) -> float:
    """Fraction of z in Z_p^d with h.z = 0 (mod p), by enumeration."""
    residues = _all_residues(p, len(h))
    return float(np.mean((residues @ np.asarray(h, dtype=np.int64)) % p == 0))


def b_n_lambda(n: int, lam: float, mu: float) -> float:
    """B_{n,lambda} = n^lambda (8 mu)^{-lambda}; r(h) exceeds it on every dual point."""
    validate_integer(n, "n", minimum=2)
    if not lam > 0 or not mu > 0:
        raise DomainError(f"need lambda > 0 and mu > 0, got {lam}, {mu}")
    return (n / (8.0 * mu)) ** lam
