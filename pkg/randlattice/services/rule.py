"""Rank-1 lattice rules and their randomization over a prime band."""

from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..shared.models import GeneratingVector, Integrand, IntegrandKind, PrimeBand, RandomRuleDraw, TrigPolynomial
from ..shared.utils.exceptions import ContractViolationError, DomainError
from ..shared.utils.logging import get_logger
from ..shared.utils.serialization import parse_coefficient_file
from ..shared.utils.streams import RandomStreams
from ..shared.utils.validation import validate_integer, validate_shift
from .primes import reduce_mod

logger = get_logger(__name__)


def lattice_nodes(p: int, z: Sequence[int], shift: Optional[Sequence[float]] = None) -> np.ndarray:
    """Points {k z/p + shift} for k = 0..p-1, as a (p, d) array.

    z may hold any integer representatives; only z mod p is used.
    """
    validate_integer(p, "p", minimum=1)
    residues = np.asarray(reduce_mod(z, p), dtype=np.int64)
    k = np.arange(p, dtype=np.int64)[:, None]
    nodes = ((k * residues[None, :]) % p) / p
    if shift is not None:
        shift = np.asarray(validate_shift(shift, len(residues)))
        nodes = np.mod(nodes + shift[None, :], 1.0)
    return nodes


def lattice_rule(f: Integrand, p: int, z: Sequence[int], shift: Optional[Sequence[float]] = None) -> complex:
    """(1/p) sum_k f({k z/p + shift})."""
    if len(z) != f.dimension:
        raise ContractViolationError(f"generating vector has length {len(z)}, integrand dimension is {f.dimension}")
    values = np.asarray(f(lattice_nodes(p, z, shift)))
    return complex(np.mean(values))


def trig_rule_error_exact(f: TrigPolynomial, p: int, z: Sequence[int]) -> List[Tuple[Tuple[int, ...], complex]]:
    """Nonzero modes h with h.z = 0 (mod p), i.e. those aliased onto the mean."""
    z = reduce_mod(z, p)
    return [
        (h, c)
        for h, c in zip(f.modes, f.coefficients)
        if any(h) and sum(hj * zj for hj, zj in zip(h, z)) % p == 0
    ]


def draw(
    band: PrimeBand,
    rng: np.random.Generator,
    with_shift: bool,
    dimension: int,
    shift_rng: Optional[np.random.Generator] = None,
    seed_trace: Tuple[int, ...] = (),
) -> RandomRuleDraw:
    """Uniform prime from the band and, optionally, a uniform shift from a separate stream."""
    index = int(rng.integers(0, band.size))
    shift = None
    if with_shift:
        source = rng if shift_rng is None else shift_rng
        shift = tuple(float(component) for component in source.random(dimension))
    return RandomRuleDraw(p=band.primes[index], shift=shift, seed_trace=seed_trace)


def sample_rule(
    f: Integrand,
    gv: GeneratingVector,
    seed: int,
    with_shift: bool = True,
    repetitions: int = 1,
) -> List[Tuple[RandomRuleDraw, complex]]:
    """Independent (draw, estimate) pairs; repetition i uses substream i of the seed."""
    validate_integer(repetitions, "m", minimum=1)
    if f.dimension != gv.dimension:
        raise ContractViolationError(f"integrand dimension {f.dimension} differs from vector dimension {gv.dimension}")
    streams = RandomStreams(seed)
    samples = []
    for index in range(repetitions):
        prime_rng, shift_rng = streams.for_repetition(index)
        realisation = draw(gv.band, prime_rng, with_shift, gv.dimension, shift_rng, (streams.seed, index))
        estimate = lattice_rule(f, realisation.p, gv.residue(realisation.p), realisation.shift)
        samples.append((realisation, estimate))
    return samples


def randomized_integrate(
    f: Integrand,
    gv: GeneratingVector,
    seed: int,
    with_shift: bool = True,
    repetitions: int = 1,
) -> np.ndarray:
    """m independent realisations of the randomized lattice rule."""
    estimates = np.array([estimate for _, estimate in sample_rule(f, gv, seed, with_shift, repetitions)])
    logger.debug("Randomized integration", integrand=f.name, repetitions=repetitions, shift=with_shift)
    return estimates


def trig_integrand(polynomial: TrigPolynomial, name: str = "trig") -> Integrand:
    return Integrand(
        name=name,
        dimension=polynomial.dimension,
        evaluate=polynomial.evaluate,
        known_integral=polynomial.integral(),
        kind=IntegrandKind.TRIG_POLYNOMIAL,
        polynomial=polynomial,
    )


def constant_integrand(dimension: int, value: float = 1.0) -> Integrand:
    return Integrand(
        name="constant",
        dimension=dimension,
        evaluate=lambda x: np.full(len(np.atleast_2d(x)), value),
        known_integral=value,
        kind=IntegrandKind.CLOSED_FORM_FAMILY,
    )


def step_integrand(dimension: int, cut: float = 0.5) -> Integrand:
    """Indicator of the box [0, cut)^d."""
    if not 0.0 < cut < 1.0:
        raise DomainError(f"cut must lie in (0, 1), got {cut}")
    return Integrand(
        name="step",
        dimension=dimension,
        evaluate=lambda x: np.all(np.atleast_2d(x) < cut, axis=1).astype(float),
        known_integral=cut**dimension,
        kind=IntegrandKind.CLOSED_FORM_FAMILY,
    )


def kink_integrand(dimension: int, exponent: float, center: float = 0.5) -> Integrand:
    """prod_j |x_j - c|^s, a low-smoothness product with a closed-form integral."""
    if not exponent > 0:
        raise DomainError(f"kink exponent must be positive, got {exponent}")
    if not 0.0 <= center <= 1.0:
        raise DomainError(f"kink center must lie in [0, 1], got {center}")
    one_dimensional = (center ** (exponent + 1) + (1.0 - center) ** (exponent + 1)) / (exponent + 1)
    return Integrand(
        name="kink",
        dimension=dimension,
        evaluate=lambda x: np.prod(np.abs(np.atleast_2d(x) - center) ** exponent, axis=1),
        known_integral=one_dimensional**dimension,
        kind=IntegrandKind.CLOSED_FORM_FAMILY,
    )


def load_trig_integrand(path: Path) -> Integrand:
    """Trig polynomial from a coefficient file."""
    polynomial = TrigPolynomial.from_mapping(parse_coefficient_file(Path(path).read_text()))
    return trig_integrand(polynomial, name=Path(path).name)
