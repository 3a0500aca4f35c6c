"""Tests for good-set membership and generating vector construction."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from randlattice.services.analysis import DualSearch
from randlattice.services.construct import (
    average_dual_sum,
    b_n_lambda,
    bernoulli_polynomial,
    build_generating_vector,
    certify_residues,
    dual_fraction,
    dual_sum_exact,
    dual_sum_truncated,
    exhaustive_good_residue,
    find_good_residue,
    good_set,
    is_good,
    make_criterion,
    periodic_zeta,
)
from randlattice.services.primes import sieve_band
from randlattice.services.space import r_values, zeta
from randlattice.shared.models import KorobovSpace, WeightScheme
from randlattice.shared.utils.exceptions import (
    ContractViolationError,
    DomainError,
    SearchFailureError,
    UnsupportedExactModeError,
)

from .conftest import PI2_3, SEED, make_space

ORACLE_PRIMES = [2, 3, 5, 7, 11, 13, 31]


class TestBernoulli:
    x = np.linspace(0.0, 0.99, 12)

    def test_polynomials(self):
        x = self.x
        np.testing.assert_allclose(bernoulli_polynomial(2, x), x**2 - x + 1 / 6, atol=1e-14)
        np.testing.assert_allclose(bernoulli_polynomial(4, x), x**4 - 2 * x**3 + x**2 - 1 / 30, atol=1e-14)
        np.testing.assert_allclose(
            bernoulli_polynomial(6, x), x**6 - 3 * x**5 + 2.5 * x**4 - 0.5 * x**2 + 1 / 42, atol=1e-14
        )

    def test_periodic_zeta_values(self):
        assert periodic_zeta(2, 0.0) == pytest.approx(PI2_3)
        assert periodic_zeta(2, 0.5) == pytest.approx(-math.pi**2 / 6)
        assert periodic_zeta(4, 0.0) == pytest.approx(math.pi**4 / 45)

    def test_periodic_zeta_matches_fourier_series(self):
        h = np.arange(1, 100_001)
        for x in (0.1, 0.3, 0.75):
            series = 2 * np.sum(np.cos(2 * np.pi * h * x) / h**2)
            assert periodic_zeta(2, x) == pytest.approx(series, abs=2e-5)

    def test_odd_order(self):
        with pytest.raises(UnsupportedExactModeError):
            periodic_zeta(3, 0.5)


class TestDualSums:
    def test_exact_smallest_prime(self, unit_space):
        crit = make_criterion(unit_space)
        assert dual_sum_exact((1,), 2, crit).value == pytest.approx(math.pi**2 / 12, rel=1e-14)

    def test_exact_zero_vector(self, unit_space):
        crit = make_criterion(unit_space)
        assert dual_sum_exact((0,), 7, crit).value == pytest.approx(PI2_3, rel=1e-14)

    def test_exact_against_truncated(self, plane_space):
        crit = make_criterion(plane_space)
        exact = dual_sum_exact((1, 1), 3, crit).value
        truncated = dual_sum_truncated((1, 1), 3, plane_space, crit.lam, 2000)
        assert truncated.value <= exact <= truncated.upper

    def test_oracle_equivalence(self):
        rng = np.random.default_rng(SEED)
        for dimension in (1, 2, 3):
            space = make_space(dimension=dimension)
            crit = make_criterion(space)
            for p in ORACLE_PRIMES:
                for _ in range(50):
                    z = tuple(int(c) for c in rng.integers(0, p, size=dimension))
                    exact = dual_sum_exact(z, p, crit).value
                    truncated = dual_sum_truncated(z, p, space, crit.lam, 2000)
                    gap = exact - truncated.value
                    assert -1e-10 * exact <= gap <= truncated.tail_bound + 1e-10 * exact
                    if dimension <= 2:
                        assert truncated.tail_bound <= 0.05 * exact
                    if dimension == 1 and p <= 3:
                        assert truncated.tail_bound <= 1e-3 * exact

    def test_single_prime_closed_value(self, unit_space):
        truncated = dual_sum_truncated((1,), 11, unit_space, 0.25, 10_000)
        expected = 2 / 121 * math.fsum(1 / m**2 for m in range(1, 910))
        assert truncated.value == pytest.approx(expected, rel=1e-9)
        assert truncated.value == pytest.approx(0.027171, abs=1e-6)

    def test_unit_box(self, unit_space):
        truncated = dual_sum_truncated((1,), 2, unit_space, 0.25, 1)
        assert truncated.value == pytest.approx(0.0, abs=1e-15)
        assert truncated.tail_bound >= math.pi**2 / 12

    def test_methods_agree(self, plane_space):
        residue = dual_sum_truncated((1, 2), 5, plane_space, 0.25, 40, method="residue")
        enumerated = dual_sum_truncated((1, 2), 5, plane_space, 0.25, 40, method="enumerate")
        assert residue.value == pytest.approx(enumerated.value, rel=1e-10)
        assert residue.tail_bound == enumerated.tail_bound

    def test_methods_agree_for_explicit_weights(self):
        space = KorobovSpace(
            alpha=0.5,
            dimension=2,
            weights=WeightScheme(kind="explicit", product=(1.0, 0.5), explicit={(1, 2): 0.1}),
        )
        residue = dual_sum_truncated((1, 3), 7, space, 0.25, 30)
        enumerated = dual_sum_truncated((1, 3), 7, space, 0.25, 30, method="enumerate")
        assert residue.value == pytest.approx(enumerated.value, rel=1e-10)

    def test_explicit_weights_truncated_against_exact_sum(self):
        space = KorobovSpace(
            alpha=0.5,
            dimension=2,
            weights=WeightScheme(kind="explicit", product=(1.0, 0.5), explicit={(1, 2): 0.1}),
        )
        truncated = dual_sum_truncated((1, 3), 7, space, 0.25, 2000)
        wider = dual_sum_truncated((1, 3), 7, space, 0.25, 20000)
        assert truncated.value <= wider.value <= truncated.upper

    def test_tail_shrinks_with_box(self, plane_space):
        tails = [dual_sum_truncated((1, 4), 11, plane_space, 0.25, box).tail_bound for box in (10, 100, 1000)]
        assert tails[0] >= tails[1] >= tails[2]

    def test_box_below_one(self, unit_space):
        with pytest.raises(DomainError):
            dual_sum_truncated((1,), 5, unit_space, 0.25, 0)

    def test_residue_validation(self, unit_space):
        with pytest.raises(ContractViolationError):
            dual_sum_truncated((5,), 5, unit_space, 0.25, 10)
        with pytest.raises(DomainError):
            dual_sum_truncated((1,), 9, unit_space, 0.25, 10)

    def test_unsupported_exponent(self):
        crit = make_criterion(make_space(alpha=0.5), lam=0.3)
        assert not crit.exact
        with pytest.raises(UnsupportedExactModeError):
            dual_sum_exact((1,), 5, crit)

    def test_exact_sum_with_explicit_weights(self):
        space = KorobovSpace(
            alpha=0.5,
            dimension=2,
            weights=WeightScheme(kind="explicit", product=(1.0, 0.5), explicit={(1, 2): 0.1}),
        )
        crit = make_criterion(space)
        assert crit.exact
        exact = dual_sum_exact((1, 3), 7, crit).value
        truncated = dual_sum_truncated((1, 3), 7, space, crit.lam, 2000)
        assert truncated.value <= exact <= truncated.upper
        assert exact == pytest.approx(0.0714667018, rel=1e-8)
        assert is_good((1, 3), 7, crit) == (exact <= crit.threshold(7), exact)


class TestGoodSet:
    def test_smallest_prime(self, unit_space):
        crit = make_criterion(unit_space)
        good, achieved = is_good((1,), 2, crit)
        assert good
        assert achieved == pytest.approx(math.pi**2 / 12)
        assert crit.threshold(2) == pytest.approx(2 * PI2_3)

    def test_zero_vector_is_bad(self, unit_space):
        assert not is_good((0,), 7, make_criterion(unit_space))[0]

    @pytest.mark.parametrize("p,dimension", [(3, 1), (5, 1), (7, 1), (3, 2), (5, 2), (7, 2)])
    def test_density(self, p, dimension):
        crit = make_criterion(make_space(dimension=dimension))
        assert len(good_set(p, crit)) >= math.ceil(p**dimension / 2)

    def test_exhaustive_minimizer(self, unit_space):
        z, achieved = exhaustive_good_residue(5, make_criterion(unit_space))
        assert z != (0,)
        assert achieved == pytest.approx(2 * zeta(2) / 25)

    @pytest.mark.parametrize("p", [3, 5, 7])
    @pytest.mark.parametrize("dimension", [1, 2])
    def test_average_dual_sum(self, p, dimension):
        crit = make_criterion(make_space(dimension=dimension))
        assert average_dual_sum(p, crit) <= 2 * crit.mu / p

    @given(st.sampled_from([2, 3, 5, 7, 11, 13]), st.lists(st.integers(-30, 30), min_size=1, max_size=2))
    def test_dual_fraction(self, p, h):
        expected = 1.0 if all(component % p == 0 for component in h) else 1.0 / p
        assert dual_fraction(h, p) == pytest.approx(expected)

    def test_truncated_membership_is_an_upper_bound(self):
        space = make_space(alpha=0.5, dimension=2)
        crit = make_criterion(space, lam=0.3)
        good, achieved = is_good((1, 5), 13, crit)
        assert achieved >= dual_sum_truncated((1, 5), 13, space, 0.3, 2000).value
        assert good == (achieved <= crit.threshold(13))


class TestSearch:
    def test_smallest_prime(self, unit_space):
        z, _ = find_good_residue(2, make_criterion(unit_space), np.random.default_rng(1))
        assert z in {(0,), (1,)}

    def test_reproducible(self, plane_space):
        crit = make_criterion(plane_space)
        first = find_good_residue(31, crit, np.random.default_rng(5))
        second = find_good_residue(31, crit, np.random.default_rng(5))
        assert first == second

    def test_failure_names_prime(self, unit_space):
        crit = make_criterion(unit_space, threshold_factor=1e-9)
        with pytest.raises(SearchFailureError) as excinfo:
            find_good_residue(11, crit, np.random.default_rng(0), max_tries=3)
        assert excinfo.value.prime == 11
        assert excinfo.value.tries == 3

    def test_build_certified(self, band20, plane_space):
        gv = build_generating_vector(band20, make_criterion(plane_space), SEED)
        assert gv.band.primes == (11, 13, 17, 19)
        assert gv.is_certified()
        assert gv.seed == SEED

    def test_build_reproducible_and_parallel(self, plane_space):
        band = sieve_band(64)
        crit = make_criterion(plane_space)
        serial = build_generating_vector(band, crit, SEED)
        again = build_generating_vector(band, crit, SEED)
        parallel = build_generating_vector(band, crit, SEED, max_workers=4)
        assert serial.residues == again.residues == parallel.residues

    @pytest.mark.parametrize("dimension", [1, 2, 3, 4])
    def test_smallest_band(self, dimension):
        gv = build_generating_vector(sieve_band(2), make_criterion(make_space(dimension=dimension)), SEED)
        assert gv.is_certified()

    def test_truncated_construction(self, band20):
        crit = make_criterion(make_space(dimension=2), lam=0.3)
        assert build_generating_vector(band20, crit, SEED).is_certified()

    def test_certify_given_residues(self, band20, unit_space):
        crit = make_criterion(unit_space)
        gv = certify_residues(band20, {p: (p + 1,) for p in band20.primes}, crit)
        assert all(gv.residue(p) == (1,) for p in band20.primes)
        assert gv.is_certified()

    def test_residue_map_must_cover_band(self, band20):
        with pytest.raises(ValueError):
            certify_residues(band20, {11: (1,)})


class TestDualBound:
    def test_example(self):
        assert b_n_lambda(20, 0.25, PI2_3) == pytest.approx((20 / (8 * PI2_3)) ** 0.25)
        assert b_n_lambda(20, 0.25, PI2_3) == pytest.approx(0.93366, abs=1e-4)

    def test_limits(self):
        assert b_n_lambda(100, 0.25, 1e9) < 0.05
        assert b_n_lambda(100, 1e-9, PI2_3) == pytest.approx(1.0, abs=1e-8)

    def test_domain(self):
        with pytest.raises(DomainError):
            b_n_lambda(1, 0.25, 1.0)
        with pytest.raises(DomainError):
            b_n_lambda(20, 0.25, 0.0)

    @pytest.mark.parametrize("n", [20, 37, 64])
    @pytest.mark.parametrize("dimension", [1, 2])
    def test_dual_points_exceed_bound(self, vector_factory, n, dimension):
        space = make_space(dimension=dimension)
        crit = make_criterion(space)
        gv = vector_factory(n, space)
        frequencies, _ = DualSearch(gv, space).all_counts(200)
        assert len(frequencies)
        assert np.all(r_values(space, frequencies) > b_n_lambda(n, crit.lam, crit.mu))
