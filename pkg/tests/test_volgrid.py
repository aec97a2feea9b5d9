import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import staircase_generators
from multbound.staircase import downward_closure, volume_delta
from multbound.volgrid import (
    GridSpec,
    RegionPredicate,
    SaturationError,
    ToleranceError,
    decimal_string,
    error_bound,
    estimate_volume,
    grid_points,
    halfspace_region,
    inner_outer,
    refine_to_tolerance,
    simplex_region,
    staircase_region,
)

F = Fraction


def brute_counts(pred, spec):
    """Grid count and interior count by scanning every grid point."""
    side = spec.side
    inside = [
        idx
        for idx in itertools.product(range(side + 1), repeat=pred.n)
        if pred(tuple(F(j, spec.m) for j in idx))
    ]
    return len(inside), sum(1 for idx in inside if all(idx))


triangle = simplex_region((1, 1), 1)


class TestGridPoints:
    def test_triangle(self):
        pts = grid_points(triangle, GridSpec(1, 10))
        assert len(pts) == 66
        assert set(pts) == {(i, j) for i in range(11) for j in range(11) if i + j <= 10}

    def test_full_grid(self):
        pts = grid_points(RegionPredicate(2, lambda p: True), GridSpec(1, 2))
        assert len(pts) == 9

    def test_origin_only(self):
        pts = grid_points(RegionPredicate(3, lambda p: not any(p)), GridSpec(1, 5))
        assert list(pts) == [(0, 0, 0)]

    def test_column_scan_matches_brute_force(self):
        # m large enough to leave the exhaustive path
        region = simplex_region((2, 3), F(2, 3))
        spec = GridSpec(2, 40)
        assert (spec.side + 1) ** 2 > 4096
        pts = grid_points(region, spec)
        assert (len(pts), pts.interior_count()) == brute_counts(region, spec)

    def test_three_dimensional_columns(self):
        region = simplex_region((1, 2, 3), 1)
        spec = GridSpec(3, 6)
        pts = grid_points(region, spec)
        assert (len(pts), pts.interior_count()) == brute_counts(region, spec)

    def test_saturation_violation_small_grid(self):
        ring = RegionPredicate(2, lambda p: F(1, 4) <= p[0] + p[1] <= 1)
        with pytest.raises(SaturationError):
            grid_points(ring, GridSpec(1, 4))

    def test_saturation_violation_spot_check(self):
        ring = RegionPredicate(2, lambda p: p[0] + p[1] <= 1 and not (p[0] < F(1, 2) and p[1] > F(1, 4)))
        with pytest.raises(SaturationError):
            grid_points(ring, GridSpec(1, 100))

    def test_declared_not_saturated(self):
        with pytest.raises(SaturationError):
            grid_points(RegionPredicate(1, lambda p: True, lower_saturated=False), GridSpec(1, 1))


class TestInnerOuter:
    def test_triangle(self):
        pts = grid_points(triangle, GridSpec(1, 10))
        assert inner_outer(pts, GridSpec(1, 10)) == (F(45, 100), F(66, 100))

    def test_full_grid(self):
        spec = GridSpec(1, 2)
        pts = grid_points(RegionPredicate(2, lambda p: True), spec)
        assert inner_outer(pts, spec) == (1, F(9, 4))

    def test_origin_only(self):
        spec = GridSpec(1, 5)
        pts = grid_points(RegionPredicate(2, lambda p: not any(p)), spec)
        assert inner_outer(pts, spec) == (0, F(1, 25))


class TestErrorBound:
    def test_examples(self):
        assert error_bound(2, GridSpec(1, 10)) == F(4, 10)
        assert error_bound(1, GridSpec(7, 3)) == F(1, 3)
        assert error_bound(3, GridSpec(2, 100)) == F(27, 100)

    def test_boundary_count_recursion(self):
        # #{grid points with some zero coordinate} <= n (1 + N)^(n-1) m^(n-1)
        for n, N, m in itertools.product(range(1, 4), range(1, 3), range(1, 5)):
            side = m * N
            boundary = (side + 1) ** n - side**n
            assert F(boundary, m**n) <= error_bound(n, GridSpec(N, m))


class TestEstimate:
    def test_triangle_brackets_half(self):
        est = estimate_volume(triangle, GridSpec(1, 10))
        assert est.inner == F(45, 100) and est.outer == F(66, 100)
        assert est.inner <= F(1, 2) <= est.outer
        assert est.gap == F(21, 100) <= est.error_bound

    def test_box(self):
        box = RegionPredicate(2, lambda p: all(x <= 1 for x in p))
        for m in (1, 3, 8):
            est = estimate_volume(box, GridSpec(1, m))
            assert est.inner == 1
            assert est.outer == F((m + 1) ** 2, m**2)

    def test_box_extends_beyond_window(self):
        box = RegionPredicate(2, lambda p: all(x <= 1 for x in p))
        est = estimate_volume(box, GridSpec(2, 4))
        assert est.inner == 1 and est.outer == F(25, 16)

    def test_simplex_midpoint(self):
        d, eps = (F(3, 2), 2), F(1, 2)
        target = eps**2 / 2 * d[0] * d[1]
        for m in (4, 16, 64):
            est = estimate_volume(simplex_region(d, eps), GridSpec(1, m))
            assert est.inner <= target <= est.outer
            assert abs(est.midpoint - target) <= est.error_bound / 2

    def test_monotone_refinement(self):
        region = simplex_region((1, 2), F(3, 4))
        previous = None
        for m in (1, 2, 4, 8, 16, 32, 64, 128):
            est = estimate_volume(region, GridSpec(2, m))
            if previous is not None:
                assert est.inner >= previous.inner and est.outer <= previous.outer
            previous = est

    def test_json_rendering(self):
        data = estimate_volume(triangle, GridSpec(1, 10)).to_json(digits=3)
        assert data["inner"] == "9/20" and data["outer"] == "33/50"
        assert data["decimal"]["gap"] == "0.210"


class TestStaircaseConsistency:
    @settings(max_examples=30)
    @given(st.integers(1, 3).flatmap(lambda n: st.tuples(st.just(n), staircase_generators(n, 3, 4))))
    def test_unit_grid_recovers_counts(self, case):
        n, gens = case
        sigma = downward_closure(gens, n)
        N = max(sigma.bounding_box(), default=0) + 1
        outer = estimate_volume(staircase_region(sigma, "delta_prime"), GridSpec(N, 1))
        assert outer.outer == len(sigma)
        inner = estimate_volume(staircase_region(sigma, "delta"), GridSpec(N, 1))
        assert inner.inner == volume_delta(sigma)

    def test_inner_converges_to_volume_delta(self):
        sigma = downward_closure([(2, 1), (0, 3)], 2)
        for m in (1, 2, 8):
            est = estimate_volume(staircase_region(sigma, "delta"), GridSpec(4, m))
            assert est.inner == volume_delta(sigma) == 2


class TestRefine:
    def test_chooses_power_of_two(self):
        est = refine_to_tolerance(triangle, 1, F(1, 100))
        assert est.spec.m == 512
        assert est.error_bound <= F(1, 100)

    def test_loose_tolerance(self):
        assert refine_to_tolerance(triangle, 1, 4).spec.m == 1

    def test_m_max(self):
        with pytest.raises(ToleranceError) as info:
            refine_to_tolerance(triangle, 1, F(1, 10**6), m_max=64)
        assert info.value.required_m == 4194304


class TestRegions:
    def test_halfspaces(self):
        region = halfspace_region([["1", "1", "1"], ["2", "0", "1"]])
        assert region((F(1, 2), F(1, 2))) and not region((F(3, 4), 0))
        est = estimate_volume(region, GridSpec(1, 8))
        assert est.inner <= F(3, 8) <= est.outer

    def test_negative_coefficients_are_not_saturated(self):
        region = halfspace_region([["1", "-1", "1"]])
        with pytest.raises(SaturationError):
            estimate_volume(region, GridSpec(1, 4))


def test_decimal_string():
    assert decimal_string(F(2, 3), 4) == "0.6667"
    assert decimal_string(F(-1, 8), 2) == "-0.12"
    assert decimal_string(F(7), 0) == "7"
