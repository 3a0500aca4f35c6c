"""Worst-case RMS error of the randomized rule, empirical errors and bound witnesses."""

import itertools
import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import Field

from ..shared.config import settings
from ..shared.models import (
    BaseModel,
    BoundParams,
    ErrorReport,
    Estimate,
    GeneratingVector,
    Integrand,
    KorobovSpace,
    OmegaProfile,
    PrimeBand,
    TrigPolynomial,
)
from ..shared.models.space import canonical_frequency
from ..shared.utils.exceptions import ContractViolationError, DomainError
from ..shared.utils.logging import get_logger
from ..shared.utils.validation import validate_frequency, validate_integer
from .bounds import labelled_partitions, theorem1_bound
from .rule import randomized_integrate, trig_integrand
from .space import mu_value, r_value, r_values

logger = get_logger(__name__)

# Relative tolerance under which two candidate errors count as tied
TIE_TOLERANCE = 1e-12
# The cross region is cut slightly below the best axis value so that it stays inside the search
THRESHOLD_MARGIN = 1e-9
MAX_REGION = 1e15

Candidate = Tuple[float, Tuple[int, ...]]


def omega(h: Sequence[int], gv: GeneratingVector) -> Fraction:
    """Fraction of band primes whose dual lattice contains h."""
    return OmegaProfile(gv=gv)(validate_frequency(h, gv.dimension))


def _better(incumbent: Optional[Candidate], challenger: Candidate) -> Candidate:
    if incumbent is None or incumbent[1] is None:
        return challenger
    value, h = challenger
    best, best_h = incumbent
    if value > best * (1 + TIE_TOLERANCE):
        return challenger
    if value >= best * (1 - TIE_TOLERANCE) and h < best_h:
        return challenger
    return incumbent


def _concat_ranges(first: np.ndarray, counts: np.ndarray, step: int) -> np.ndarray:
    """first[i] + step * (0..counts[i]-1), concatenated."""
    offsets = np.arange(int(counts.sum()), dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
    return np.repeat(first, counts) + step * offsets


def _limit(count: int) -> None:
    if count > settings.max_search_candidates:
        raise DomainError(
            "search region too large", {"candidates": count, "limit": settings.max_search_candidates}
        )


def _magnitude_rows(width: int, region: float, cap: int) -> np.ndarray:
    """All (a_1..a_w) with 1 <= a_i <= cap and prod a_i <= region."""
    rows = np.ones((1, 0), dtype=np.int64)
    product = np.ones(1)
    for _ in range(width):
        counts = np.full(len(product), cap, dtype=np.int64)
        if math.isfinite(region):
            counts = np.minimum(counts, np.floor(region / product).astype(np.int64))
        counts = np.maximum(counts, 0)
        _limit(int(counts.sum()))
        values = _concat_ranges(np.ones(len(counts), dtype=np.int64), counts, 1)
        rows = np.hstack([np.repeat(rows, counts, axis=0), values[:, None]])
        product = np.repeat(product, counts) * values
    return rows


class DualSearch:
    """Enumerates canonical dual frequencies of every band prime in a hyperbolic region.

    The region for a support u is {h : supp(h) = u, prod |h_j| <= K_u, |h_j| <= H};
    each (h, p) pair is produced exactly once so that duplicate counts equal omega(h) L.
    """

    def __init__(self, gv: GeneratingVector, space: KorobovSpace):
        if gv.dimension != space.dimension:
            raise ContractViolationError(
                f"generating vector dimension {gv.dimension} differs from space dimension {space.dimension}"
            )
        self.gv = gv
        self.space = space
        self.primes = np.asarray(gv.band.primes, dtype=np.int64)
        self.residues = np.asarray([gv.residue(p) for p in gv.band.primes], dtype=np.int64)
        self.size = gv.band.size

    def best_axis(self, box: Optional[int] = None) -> Optional[Candidate]:
        """Best single-coordinate frequency, analytically.

        On coordinate j, omega(t e_j) L counts primes with z_j = 0 plus primes
        dividing t, so t is best taken as a product of the smallest other primes.
        """
        best = None
        alpha = self.space.alpha
        for j in range(self.space.dimension):
            zero = self.residues[:, j] == 0
            others = [int(p) for p in self.primes[~zero]]
            gamma = self.space.weight((j + 1,))
            t, log_t = 1, 0.0
            for m in range(len(others) + 1):
                if m:
                    t *= others[m - 1]
                    log_t += math.log(others[m - 1])
                if box is not None and t > box:
                    break
                hits = int(zero.sum()) + m
                if hits == 0:
                    continue
                value = gamma * math.exp(-alpha * log_t) * math.sqrt(hits / self.size)
                h = tuple(t if i == j else 0 for i in range(self.space.dimension))
                best = _better(best, (value, h))
        return best

    def _complete(
        self,
        p: int,
        zu: np.ndarray,
        lead: int,
        others: List[int],
        rows: np.ndarray,
        low: np.ndarray,
        high: np.ndarray,
        any_class: bool,
    ) -> List[np.ndarray]:
        """Attach signs to the other coordinates and solve for the lead coordinate."""
        combos = list(itertools.product((1, -1), repeat=len(others)))
        patterns = np.array(combos, dtype=np.int64).reshape(len(combos), len(others))
        if lead > 0:
            # the first coordinate is among the others and carries the positive sign
            patterns = patterns[patterns[:, 0] == 1]
        signed = (rows[:, None, :] * patterns[None, :, :]).reshape(len(rows) * len(patterns), len(others))
        low = np.repeat(low, len(patterns))
        high = np.repeat(high, len(patterns))
        partial = ((signed % p) @ zu[others]) % p if others else np.zeros(len(signed), dtype=np.int64)

        blocks = []
        for direction in ((1,) if lead == 0 else (1, -1)):
            if any_class:
                first, step = low, 1
                counts = np.maximum(high - low + 1, 0)
            else:
                target = (-partial * pow(int(zu[lead]), -1, p)) % p
                target = target if direction == 1 else (-target) % p
                first, step = low + (target - low) % p, p
                counts = np.where(first <= high, (high - first) // p + 1, 0)
            total = int(counts.sum())
            if not total:
                continue
            _limit(total)
            block = np.zeros((total, len(zu)), dtype=np.int64)
            if others:
                block[:, others] = np.repeat(signed, counts, axis=0)
            block[:, lead] = direction * _concat_ranges(first, counts, step)
            blocks.append(block)
        return blocks

    def _prime_candidates(self, p: int, zu: np.ndarray, region: float, box: Optional[int]) -> List[np.ndarray]:
        width = len(zu)
        cap_box = box if box is not None else np.iinfo(np.int64).max
        nonzero = np.flatnonzero(zu)
        blocks = []
        if len(nonzero) == width:
            # lead = first coordinate of largest magnitude; others are then bounded by sqrt(K)
            cap = min(cap_box, math.isqrt(int(region))) if math.isfinite(region) else cap_box
            for lead in range(width):
                others = [i for i in range(width) if i != lead]
                rows = _magnitude_rows(width - 1, region, cap)
                if not len(rows):
                    continue
                raised = rows + (np.asarray(others, dtype=np.int64) < lead)
                low = np.max(raised, axis=1, initial=1)
                high = np.full(len(rows), cap_box, dtype=np.int64)
                if math.isfinite(region):
                    high = np.minimum(high, np.floor(region / np.prod(rows, axis=1, dtype=float)).astype(np.int64))
                keep = low <= high
                blocks += self._complete(p, zu, lead, others, rows[keep], low[keep], high[keep], False)
        else:
            lead = int(nonzero[0]) if len(nonzero) else 0
            others = [i for i in range(width) if i != lead]
            cap = min(cap_box, int(region)) if math.isfinite(region) else cap_box
            rows = _magnitude_rows(width - 1, region, cap)
            if len(rows):
                low = np.ones(len(rows), dtype=np.int64)
                high = np.full(len(rows), cap_box, dtype=np.int64)
                if math.isfinite(region):
                    high = np.minimum(high, np.floor(region / np.prod(rows, axis=1, dtype=float)).astype(np.int64))
                blocks += self._complete(p, zu, lead, others, rows, low, high, not len(nonzero))
        return blocks

    def support_counts(
        self, subset: Sequence[int], region: float, box: Optional[int]
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Distinct canonical frequencies with support ``subset`` (0-based) and their prime counts."""
        if not math.isfinite(region) and box is None:
            raise DomainError("an unbounded region needs a box radius")
        if math.isfinite(region) and region > MAX_REGION:
            raise DomainError("search region too large", {"K": region})
        columns = list(subset)
        blocks = []
        for p, z in zip(self.primes, self.residues):
            blocks += self._prime_candidates(int(p), z[columns] % p, region, box)
        empty = np.zeros((0, self.space.dimension), dtype=np.int64)
        if not blocks:
            return empty, np.zeros(0, dtype=np.int64)
        local = np.concatenate(blocks)
        frequencies = np.zeros((len(local), self.space.dimension), dtype=np.int64)
        frequencies[:, columns] = local
        unique, counts = np.unique(frequencies, axis=0, return_counts=True)
        return unique, counts

    def best(self, threshold: float, box: Optional[int], incumbent: Optional[Candidate]) -> Optional[Candidate]:
        """Improve on the incumbent over supports of size >= 2 where 1/r(h) > threshold."""
        best = incumbent
        alpha = self.space.alpha
        for size in range(2, self.space.dimension + 1):
            for subset in itertools.combinations(range(self.space.dimension), size):
                gamma = self.space.weight(tuple(j + 1 for j in subset))
                region = (gamma / threshold) ** (1.0 / alpha) if threshold > 0 else math.inf
                if region < 1:
                    continue
                unique, counts = self.support_counts(subset, region, box)
                if not len(unique):
                    continue
                values = np.sqrt(counts / self.size) / r_values(self.space, unique)
                top = values.max()
                # rows are sorted, so the first near-maximal row is the lexicographically smallest
                index = int(np.flatnonzero(values >= top * (1 - TIE_TOLERANCE))[0])
                best = _better(best, (float(values[index]), tuple(int(c) for c in unique[index])))
        return best

    def all_counts(self, box: int) -> Tuple[np.ndarray, np.ndarray]:
        """Every canonical dual frequency of the box with its prime count."""
        frequencies, counts = [], []
        for size in range(1, self.space.dimension + 1):
            for subset in itertools.combinations(range(self.space.dimension), size):
                unique, hits = self.support_counts(subset, math.inf, box)
                frequencies.append(unique)
                counts.append(hits)
        return np.concatenate(frequencies), np.concatenate(counts)


def _report(
    candidate: Optional[Candidate], tail: float, method: str, dimension: int, **extra
) -> ErrorReport:
    value, h = candidate if candidate is not None else (0.0, (0,) * dimension)
    return ErrorReport(
        rms_exact=value,
        maximizer=canonical_frequency(h),
        tail_bound=tail,
        certified=tail < value,
        method=method,
        **extra,
    )


def rms_exact(
    gv: GeneratingVector,
    space: KorobovSpace,
    box: Optional[int] = None,
    adaptive: bool = False,
    method: Optional[str] = None,
) -> ErrorReport:
    """
    Worst-case RMS error sup_{h != 0} sqrt(omega(h))/r(h) of the shifted randomized rule.

    Args:
        gv: Generating vector
        space: Function space
        box: Box radius H; the default searches a hyperbolic cross instead
        adaptive: Double H until the box maximum beats the tail bound
        method: "cross" or "box", inferred from ``box`` when omitted

    Returns:
        ErrorReport; certified reports hold the global supremum

    Raises:
        DomainError: For dimensions above the exact-mode limit
    """
    if space.dimension > settings.max_exact_dimension:
        raise DomainError(
            f"exact RMS error is limited to d <= {settings.max_exact_dimension}, use the empirical estimators",
            {"d": space.dimension},
        )
    search = DualSearch(gv, space)
    method = method or ("cross" if box is None else "box")

    if method == "cross":
        if box is not None:
            raise DomainError("the cross method does not take a box radius")
        axis = search.best_axis()
        # any h beating the axis candidate has 1/r(h) > threshold, so it lies in the searched cross
        threshold = axis[0] * (1 - THRESHOLD_MARGIN)
        best = search.best(threshold, None, axis)
        return _report(best, threshold, "cross", space.dimension, threshold=threshold)

    if method != "box":
        raise DomainError(f"unknown search method {method!r}")
    box = settings.truncation_box if box is None else box
    validate_integer(box, "H", minimum=1)
    gamma_max = space.max_subset_weight()
    while True:
        axis = search.best_axis(box)
        threshold = axis[0] * (1 - THRESHOLD_MARGIN) if axis is not None else 0.0
        best = search.best(threshold, box, axis)
        tail = gamma_max * (box + 1) ** -space.alpha
        value = best[0] if best is not None else 0.0
        if tail < value or not adaptive or 2 * box > settings.adaptive_box_limit:
            break
        box *= 2
    if not tail < value:
        logger.warning("RMS error not certified", n=gv.band.n, box=box, value=value, tail=tail)
    return _report(best, tail, "box", space.dimension, box=box, threshold=threshold)


def extremal_function(space: KorobovSpace, h: Sequence[int]) -> TrigPolynomial:
    """Single mode exp(2 pi i h.x)/r(h): integral 0 and unit norm for h != 0."""
    h = validate_frequency(h, space.dimension)
    if not any(h):
        raise DomainError("the extremal mode must be nonzero")
    return TrigPolynomial(modes=(h,), coefficients=(1.0 / r_value(space, h),))


def witness_fn(band: PrimeBand, space: KorobovSpace) -> TrigPolynomial:
    """sum_p exp(2 pi i p x_1)/(r(p e_1) sqrt(L)): integral 0 and unit norm."""
    scale = math.sqrt(band.size)
    modes = tuple((p,) + (0,) * (space.dimension - 1) for p in band.primes)
    return TrigPolynomial(modes=modes, coefficients=tuple(1.0 / (r_value(space, h) * scale) for h in modes))


def first_coordinate_coprime(gv: GeneratingVector) -> bool:
    """Whether z_1 is nonzero modulo every band prime."""
    return all(gv.residue(p)[0] % p for p in gv.band.primes)


def witness_errors(band: PrimeBand, space: KorobovSpace) -> Dict[str, float]:
    """Exact RMS and mean absolute error of the witness when z_1 is coprime to every prime."""
    per_prime = [1.0 / (r_value(space, (p,) + (0,) * (space.dimension - 1)) * math.sqrt(band.size)) for p in band.primes]
    return {
        "rms": math.sqrt(sum(c * c for c in per_prime) / band.size),
        "ran": sum(per_prime) / band.size,
    }


def _absolute_errors(f: Integrand, gv: GeneratingVector, seed: int, repetitions: int, with_shift: bool) -> np.ndarray:
    if f.known_integral is None:
        raise DomainError(f"integrand {f.name!r} has no known integral")
    validate_integer(repetitions, "m", minimum=2)
    estimates = randomized_integrate(f, gv, seed, with_shift, repetitions)
    return np.abs(estimates - f.known_integral)


def rms_empirical(
    f: Integrand, gv: GeneratingVector, seed: int, repetitions: int, with_shift: bool = True
) -> Estimate:
    """Root mean squared error over independent draws with a jackknife standard error."""
    squared = _absolute_errors(f, gv, seed, repetitions, with_shift) ** 2
    m = len(squared)
    leave_one_out = np.sqrt(np.maximum((squared.sum() - squared) / (m - 1), 0.0))
    stderr = math.sqrt((m - 1) / m * float(np.sum((leave_one_out - leave_one_out.mean()) ** 2)))
    return Estimate(value=math.sqrt(float(squared.mean())), stderr=stderr, repetitions=m)


def ran_empirical(
    f: Integrand, gv: GeneratingVector, seed: int, repetitions: int, with_shift: bool = True
) -> Estimate:
    """Mean absolute error over independent draws."""
    errors = _absolute_errors(f, gv, seed, repetitions, with_shift)
    return Estimate(
        value=float(errors.mean()),
        stderr=float(errors.std(ddof=1)) / math.sqrt(len(errors)),
        repetitions=len(errors),
    )


def extremal_integrand(space: KorobovSpace, h: Sequence[int]) -> Integrand:
    return trig_integrand(extremal_function(space, h), name="extremal")


def witness_integrand(band: PrimeBand, space: KorobovSpace) -> Integrand:
    return trig_integrand(witness_fn(band, space), name="witness")


def attach_empirical(
    report: ErrorReport,
    gv: GeneratingVector,
    space: KorobovSpace,
    seed: int,
    repetitions: int,
    with_shift: bool = True,
) -> ErrorReport:
    """
    Copy of the report carrying empirical RMS and randomized errors on its extremal mode.

    Both estimates reuse the same draws, so empirical_ran <= empirical_rms.
    """
    f = extremal_integrand(space, report.maximizer)
    return report.model_copy(
        update={
            "empirical_rms": rms_empirical(f, gv, seed, repetitions, with_shift),
            "empirical_ran": ran_empirical(f, gv, seed, repetitions, with_shift),
        }
    )


def lower_bound(n: int, gamma_1: float, alpha: float, c2: Optional[float] = None) -> float:
    """gamma_1 sqrt(ln n) / (sqrt(C2) n^{alpha + 1/2}); valid where L <= C2 n/ln n."""
    validate_integer(n, "n", minimum=2)
    c2 = settings.c2 if c2 is None else c2
    return gamma_1 * math.sqrt(math.log(n)) / (math.sqrt(c2) * n ** (alpha + 0.5))


def naive_bound(n: int, lam: float, mu: float) -> float:
    """(8 mu)^lambda / n^lambda, the bound from the averaged dual sum alone."""
    validate_integer(n, "n", minimum=2)
    return (8.0 * mu / n) ** lam


def attach_bounds(report: ErrorReport, band: PrimeBand, space: KorobovSpace, lam: float, r: int, mu: float) -> ErrorReport:
    """Copy of the report carrying theorem1, naive and lower bound values where they apply."""
    bounds = {"naive": naive_bound(band.n, lam, mu)}
    params = BoundParams(n=band.n, lam=lam, r=r, mu=mu, alpha=space.alpha, c1=settings.c1, c2=settings.c2, c3=settings.c3)
    if not params.violations():
        bounds["theorem1"] = theorem1_bound(params)
    if band.n >= 20:
        bounds["lower"] = lower_bound(band.n, space.weight((1,)), space.alpha)
    return report.model_copy(update={"bounds": bounds})


class RelaxedBound(BaseModel):
    """Moment form (sum_h omega^r r^{-2r})^{1/(2r)} of the RMS error."""

    order: int = Field(..., ge=1)
    box: int = Field(..., ge=1)
    value: float = Field(..., ge=0, description="Sum over the box")
    tail_bound: float = Field(..., ge=0, description="Bound on the sum outside the box")

    @property
    def lower(self) -> float:
        return self.value ** (1.0 / (2 * self.order))

    @property
    def upper(self) -> float:
        return (self.value + self.tail_bound) ** (1.0 / (2 * self.order))


def relaxed_bound(gv: GeneratingVector, space: KorobovSpace, order: int, box: int) -> RelaxedBound:
    """
    The r-th moment relaxation of the supremum, which bounds the RMS error from above.

    Raises:
        DomainError: If 2 r alpha <= 1 (the moment series diverges)
    """
    validate_integer(order, "r", minimum=1)
    validate_integer(box, "H", minimum=1)
    frequencies, counts = DualSearch(gv, space).all_counts(box)
    omega_values = counts / gv.band.size
    # both h and -h contribute
    value = 2.0 * float(np.sum(omega_values**order * r_values(space, frequencies) ** (-2.0 * order)))
    tail = mu_value(space, 1.0 / (2 * order), "truncated", box).tail_bound
    return RelaxedBound(order=order, box=box, value=value, tail_bound=tail)


def omega_moment(h: Sequence[int], gv: GeneratingVector, order: int) -> Fraction:
    """omega(h)^r from the ordered-partition expansion of the indicator sum."""
    validate_integer(order, "r", minimum=1)
    hits = OmegaProfile(gv=gv).count(validate_frequency(h, gv.dimension))
    total = sum(labelled_partitions(order, m) * math.comb(hits, m) for m in range(1, min(order, hits) + 1))
    return Fraction(total, gv.band.size**order)
