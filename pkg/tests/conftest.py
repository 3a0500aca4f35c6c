"""Shared fixtures for randlattice tests."""

import math

import pytest
from hypothesis import HealthCheck, settings as hypothesis_settings

from randlattice.services.construct import build_generating_vector, constant_vector, make_criterion
from randlattice.services.primes import sieve_band
from randlattice.shared.models import KorobovSpace, WeightScheme

hypothesis_settings.register_profile(
    "default", max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
hypothesis_settings.load_profile("default")

SEED = 20231201


def make_space(alpha: float = 0.5, dimension: int = 1, product=(1.0,), **weights) -> KorobovSpace:
    return KorobovSpace(alpha=alpha, dimension=dimension, weights=WeightScheme(product=tuple(product), **weights))


@pytest.fixture
def unit_space() -> KorobovSpace:
    """alpha = 1/2, d = 1, gamma = 1."""
    return make_space()


@pytest.fixture
def plane_space() -> KorobovSpace:
    """alpha = 1/2, d = 2, gamma = 1."""
    return make_space(dimension=2)


@pytest.fixture
def band20():
    return sieve_band(20)


@pytest.fixture
def forced_vector(band20, unit_space):
    """z = (1) modulo every prime of P_20."""
    return constant_vector(band20, (1,), make_criterion(unit_space))


@pytest.fixture
def vector_factory():
    def build(n: int, space: KorobovSpace, seed: int = SEED, lam=None):
        return build_generating_vector(sieve_band(n), make_criterion(space, lam), seed)

    return build


PI2_3 = math.pi**2 / 3
