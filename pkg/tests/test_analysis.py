"""Tests for exact and empirical error analysis."""

import math
from fractions import Fraction

import numpy as np
import pytest

from randlattice.services.analysis import (
    DualSearch,
    attach_bounds,
    attach_empirical,
    extremal_function,
    extremal_integrand,
    first_coordinate_coprime,
    lower_bound,
    naive_bound,
    omega,
    omega_moment,
    ran_empirical,
    relaxed_bound,
    rms_empirical,
    rms_exact,
    witness_errors,
    witness_fn,
    witness_integrand,
)
from randlattice.services.construct import constant_vector
from randlattice.services.primes import sieve_band
from randlattice.services.rule import constant_integrand, kink_integrand, step_integrand
from randlattice.services.space import norm_squared, r_values
from randlattice.shared.models import ErrorReport, KorobovSpace, WeightScheme
from randlattice.shared.utils.exceptions import ContractViolationError, DomainError

from .conftest import PI2_3, SEED, make_space

PIN = 1 / (2 * math.sqrt(11))


def brute_force(gv, space, box):
    """max over 0 < |h|_inf <= box of sqrt(omega(h))/r(h), by enumeration."""
    axis = np.arange(-box, box + 1)
    grid = np.stack(np.meshgrid(*([axis] * space.dimension), indexing="ij"), axis=-1).reshape(-1, space.dimension)
    grid = grid[np.any(grid != 0, axis=1)]
    counts = np.zeros(len(grid))
    for p in gv.band.primes:
        counts += (grid @ np.asarray(gv.residue(p))) % p == 0
    values = np.sqrt(counts / gv.band.size) / r_values(space, grid)
    return float(values.max())


class TestOmega:
    def test_examples(self, forced_vector):
        assert omega((11,), forced_vector) == Fraction(1, 4)
        assert omega((143,), forced_vector) == Fraction(1, 2)
        assert omega((1,), forced_vector) == 0
        assert omega((0,), forced_vector) == 1
        assert omega((11 * 13 * 17 * 19,), forced_vector) == 1

    def test_dimension_checked(self, forced_vector):
        with pytest.raises(ContractViolationError):
            omega((1, 1), forced_vector)

    @pytest.mark.parametrize("order", [1, 2, 3, 5])
    def test_moment_expansion(self, forced_vector, order):
        for h in [(11,), (143,), (0,), (7,), (2431,)]:
            assert omega_moment(h, forced_vector, order) == omega(h, forced_vector) ** order


class TestRmsExact:
    def test_pin(self, forced_vector, unit_space):
        report = rms_exact(forced_vector, unit_space)
        assert report.rms_exact == pytest.approx(PIN, abs=1e-12)
        assert report.maximizer == (11,)
        assert report.certified
        assert report.method == "cross"

    def test_pin_with_box(self, forced_vector, unit_space):
        report = rms_exact(forced_vector, unit_space, box=10_000)
        assert report.rms_exact == pytest.approx(PIN, abs=1e-12)
        assert report.certified
        assert report.tail_bound == pytest.approx(10_001**-0.5)

    def test_low_smoothness_needs_larger_box(self, forced_vector):
        space = make_space(alpha=0.25)
        fixed = rms_exact(forced_vector, space, box=100)
        assert not fixed.certified
        adaptive = rms_exact(forced_vector, space, box=100, adaptive=True)
        assert adaptive.certified
        assert adaptive.box == 200
        assert adaptive.rms_exact == pytest.approx(0.5 * 11**-0.25, abs=1e-12)

    def test_weight_scaling(self, forced_vector, unit_space):
        base = rms_exact(forced_vector, unit_space).rms_exact
        scaled = rms_exact(forced_vector, make_space(product=(0.5,))).rms_exact
        assert scaled == pytest.approx(0.5 * base)

    def test_weight_scaling_all_subsets(self, vector_factory, plane_space):
        gv = vector_factory(20, plane_space)
        scaled_space = KorobovSpace(
            alpha=0.5,
            dimension=2,
            weights=WeightScheme(kind="explicit", product=(0.5, 0.5), explicit={(1, 2): 0.5}),
        )
        base = rms_exact(gv, plane_space).rms_exact
        assert rms_exact(gv, scaled_space).rms_exact == pytest.approx(0.5 * base)

    @pytest.mark.parametrize("n", [20, 37])
    def test_matches_enumeration(self, vector_factory, plane_space, n):
        gv = vector_factory(n, plane_space)
        expected = brute_force(gv, plane_space, 200)
        box = rms_exact(gv, plane_space, box=200)
        cross = rms_exact(gv, plane_space)
        assert box.rms_exact == pytest.approx(expected, rel=1e-12)
        assert cross.certified
        assert cross.rms_exact == pytest.approx(expected, rel=1e-12)

    def test_matches_enumeration_three_dimensions(self, vector_factory):
        space = make_space(dimension=3, product=(1.0, 0.5, 0.25))
        gv = vector_factory(20, space)
        assert rms_exact(gv, space, box=20).rms_exact == pytest.approx(brute_force(gv, space, 20), rel=1e-12)
        assert rms_exact(gv, space).certified

    def test_monotone_in_box(self, vector_factory, plane_space):
        gv = vector_factory(37, plane_space)
        reports = [rms_exact(gv, plane_space, box=box) for box in (20, 40, 80)]
        values = [report.rms_exact for report in reports]
        tails = [report.tail_bound for report in reports]
        assert all(later >= earlier * (1 - 1e-12) for earlier, later in zip(values, values[1:]))
        assert tails == sorted(tails, reverse=True)

    def test_zero_residue_coordinate(self, band20, plane_space):
        gv = constant_vector(band20, (1, 0))
        report = rms_exact(gv, plane_space)
        assert report.rms_exact == pytest.approx(1.0)
        assert report.maximizer == (0, 1)
        assert report.certified

    def test_small_mixed_frequency_dominates(self, band20, plane_space):
        report = rms_exact(constant_vector(band20, (1, 1)), plane_space)
        assert report.rms_exact == pytest.approx(1.0)
        assert report.maximizer == (1, -1)

    def test_ties_resolve_lexicographically(self, band20):
        space = KorobovSpace(
            alpha=0.5, dimension=2, weights=WeightScheme(kind="explicit", explicit={(1, 2): 1e-6})
        )
        report = rms_exact(constant_vector(band20, (1, 1)), space)
        assert report.rms_exact == pytest.approx(PIN)
        assert report.maximizer == (0, 11)

    def test_dimension_limit(self, band20):
        space = make_space(dimension=4)
        with pytest.raises(DomainError):
            rms_exact(constant_vector(band20, (1, 1, 1, 1)), space)

    def test_method_arguments(self, forced_vector, unit_space):
        with pytest.raises(DomainError):
            rms_exact(forced_vector, unit_space, box=10, method="cross")
        with pytest.raises(DomainError):
            rms_exact(forced_vector, unit_space, method="sphere")

    def test_dimension_mismatch(self, forced_vector, plane_space):
        with pytest.raises(ContractViolationError):
            DualSearch(forced_vector, plane_space)

    def test_report_validation(self):
        with pytest.raises(ValueError):
            ErrorReport(rms_exact=0.1, maximizer=(11,), tail_bound=0.2, certified=True, method="box")

    def test_summary(self, forced_vector, unit_space):
        summary = rms_exact(forced_vector, unit_space).summary()
        assert summary.startswith("rms=0.150755")
        assert "h*=(11)" in summary
        assert summary.endswith("certified=true")


class TestEmpirical:
    @pytest.mark.parametrize("n", [20, 64])
    @pytest.mark.parametrize("dimension", [1, 2])
    def test_extremal_attains_exact_error(self, vector_factory, n, dimension):
        space = make_space(dimension=dimension)
        gv = vector_factory(n, space)
        report = rms_exact(gv, space)
        estimate = rms_empirical(extremal_integrand(space, report.maximizer), gv, SEED, 4000)
        assert estimate.agrees_with(report.rms_exact)

    def test_jensen(self, vector_factory, plane_space):
        gv = vector_factory(64, plane_space)
        maximizer = rms_exact(gv, plane_space).maximizer
        for f in (
            constant_integrand(2),
            step_integrand(2),
            kink_integrand(2, 0.75),
            extremal_integrand(plane_space, maximizer),
        ):
            rms = rms_empirical(f, gv, SEED, 500)
            ran = ran_empirical(f, gv, SEED, 500)
            assert ran.value <= rms.value + 1e-12

    def test_constant_has_no_error(self, forced_vector):
        estimate = rms_empirical(constant_integrand(1), forced_vector, SEED, 50)
        assert estimate.value == pytest.approx(0.0, abs=1e-12)

    def test_needs_two_repetitions(self, forced_vector):
        with pytest.raises(DomainError):
            rms_empirical(constant_integrand(1), forced_vector, SEED, 1)

    def test_report_carries_empirical_errors(self, vector_factory, plane_space):
        gv = vector_factory(64, plane_space)
        report = rms_exact(gv, plane_space)
        assert report.empirical_rms is None and report.empirical_ran is None
        extended = attach_empirical(report, gv, plane_space, SEED, 4000)
        f = extremal_integrand(plane_space, report.maximizer)
        assert extended.empirical_rms == rms_empirical(f, gv, SEED, 4000)
        assert extended.empirical_ran == ran_empirical(f, gv, SEED, 4000)
        assert extended.empirical_rms.agrees_with(report.rms_exact)
        assert extended.empirical_ran.value <= extended.empirical_rms.value + 1e-12
        assert extended.rms_exact == report.rms_exact
        assert "empirical_ran=" in extended.summary()


class TestWitness:
    def test_unit_norm_and_zero_integral(self, band20, unit_space):
        f = witness_fn(band20, unit_space)
        assert norm_squared(unit_space, f) == pytest.approx(1.0)
        assert f.integral() == 0
        assert f.coefficient((11,)) == pytest.approx(PIN)

    def test_extremal_function(self, plane_space):
        f = extremal_function(plane_space, (3, -2))
        assert norm_squared(plane_space, f) == pytest.approx(1.0)
        with pytest.raises(DomainError):
            extremal_function(plane_space, (0, 0))

    def test_witness_error_pin(self, vector_factory, unit_space):
        gv = vector_factory(100, unit_space)
        assert first_coordinate_coprime(gv)
        expected = witness_errors(gv.band, unit_space)
        f = witness_integrand(gv.band, unit_space)
        for shift in (True, False):
            ran = ran_empirical(f, gv, SEED, 10_000, with_shift=shift)
            assert ran.agrees_with(expected["ran"])
        rms = rms_empirical(f, gv, SEED, 10_000)
        assert rms.agrees_with(expected["rms"])
        assert expected["rms"] >= lower_bound(100, 1.0, 0.5)

    def test_coprimality_detects_zero(self, band20):
        assert not first_coordinate_coprime(constant_vector(band20, (11,)))


class TestBounds:
    def test_lower_bound(self):
        assert lower_bound(100, 1.0, 0.5) == pytest.approx(0.027704, abs=1e-5)

    def test_naive_bound(self):
        assert naive_bound(100, 0.25, PI2_3) == pytest.approx((8 * PI2_3 / 100) ** 0.25)
        assert naive_bound(100, 0.25, PI2_3) == pytest.approx(0.71625, abs=1e-4)

    def test_attach_bounds(self, unit_space):
        band = sieve_band(100)
        report = rms_exact(constant_vector(band, (1,)), unit_space)
        bounded = attach_bounds(report, band, unit_space, 0.25, 2, PI2_3)
        assert set(bounded.bounds) == {"naive", "theorem1", "lower"}
        assert bounded.bounds["lower"] <= bounded.rms_exact

    def test_attach_bounds_below_asymptotic_range(self, forced_vector, band20, unit_space):
        report = rms_exact(forced_vector, unit_space)
        bounded = attach_bounds(report, band20, unit_space, 0.25, 2, PI2_3)
        assert "theorem1" not in bounded.bounds

    def test_relaxed_bound(self, forced_vector, unit_space):
        report = rms_exact(forced_vector, unit_space)
        relaxed = relaxed_bound(forced_vector, unit_space, 2, 1000)
        assert report.rms_exact <= relaxed.lower <= relaxed.upper

    def test_relaxed_bound_needs_convergent_moment(self, forced_vector, unit_space):
        with pytest.raises(DomainError):
            relaxed_bound(forced_vector, unit_space, 1, 100)
