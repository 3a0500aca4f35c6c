"""Prime bands and Chinese-remainder composition."""

import math
from typing import Optional, Sequence, Tuple

from ..shared.config import settings
from ..shared.models import CrtResidues, PrimeBand
from ..shared.utils.exceptions import ContractViolationError
from ..shared.utils.validation import band_primes, validate_integer


def sieve_band(n: int) -> PrimeBand:
    """
    All primes p with n/2 < p <= n.

    Raises:
        DomainError: If n < 2
    """
    validate_integer(n, "n", minimum=2)
    return PrimeBand(n=n, primes=band_primes(n))


def pnt_bounds_check(band: PrimeBand, c1: Optional[float] = None, c2: Optional[float] = None) -> bool:
    """Whether C1 n/ln n <= L <= C2 n/ln n."""
    c1 = settings.c1 if c1 is None else c1
    c2 = settings.c2 if c2 is None else c2
    scale = band.n / math.log(band.n)
    return c1 * scale <= band.size <= c2 * scale


def reduce_mod(z: Sequence[int], p: int) -> Tuple[int, ...]:
    """Componentwise z mod p."""
    return tuple(int(component) % p for component in z)


def crt_compose(residues: CrtResidues, band: Optional[PrimeBand] = None) -> Tuple[int, ...]:
    """
    The unique z in Z_N^d with z = z^(p) (mod p) for every prime.

    Args:
        residues: Residue vector per prime
        band: Band the map must cover exactly, if given

    Returns:
        Composed vector of arbitrary-precision integers

    Raises:
        ContractViolationError: If the map does not cover the band's primes
    """
    if band is not None and not residues.matches(band):
        missing = sorted(set(band.primes) - set(residues.primes))
        extra = sorted(set(residues.primes) - set(band.primes))
        raise ContractViolationError(
            "Residue map does not match the prime band", {"missing": missing, "extra": extra}
        )

    modulus = math.prod(residues.primes)
    composed = [0] * residues.dimension
    for p, z in residues.per_prime.items():
        cofactor = modulus // p
        # cofactor * (cofactor^{-1} mod p) is 1 mod p and 0 mod every other prime
        basis = cofactor * pow(cofactor, -1, p)
        for j, component in enumerate(z):
            composed[j] += component * basis
    return tuple(component % modulus for component in composed)
