"""
Tests for Picard iteration, set-valued orbits, telescoping bounds and the oracle.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import CertificationViolationError, InputError, PreconditionError
from gauges import PointPotential, certify_map, default_grid, make_gauge, midpoint_gauge, weak_to_gauge
from iterate import (
    FIXED_POINT,
    MAX_ITER,
    STALLED,
    IterationTrace,
    StopRule,
    audit_telescoping,
    brute_force_fixed_points,
    multivalued_orbit,
    multivalued_runner,
    picard_iterate,
    picard_runner,
    telescoping_bound,
)
from iterate.orbit import RELAXED_NOTE, UNCERTIFIED_NOTE
from metric_core import (
    FiniteMetricSpace,
    MultiValuedMap,
    SingleValuedMap,
    random_multivalued_map,
    random_self_map,
    random_space,
)
from selftest import orbit_potential

seeds = st.integers(min_value=0, max_value=2**32 - 1)

SPACE = FiniteMetricSpace.on_line([0, 1, 3])
T = SingleValuedMap((0, 0, 1))


def banach(alpha):
    return make_gauge("banach", {"alpha": alpha})


class TestPicardIterate:
    """Test single-valued orbits."""

    def test_example_orbit(self):
        """3 -> 1 -> 0 -> 0 reaches the fixed point 0."""
        trace = picard_iterate(SPACE, T, 2)
        assert trace.points == [2, 1, 0, 0]
        assert trace.step_dist == [2.0, 1.0, 0.0]
        assert trace.termination == FIXED_POINT
        assert trace.fixed_point == 0
        assert trace.steps == 2

    @pytest.mark.parametrize("x0", [0, 1, 2])
    def test_identity(self, x0):
        """Every point of the identity is fixed in 0 steps."""
        trace = picard_iterate(SPACE, SingleValuedMap((0, 1, 2)), x0)
        assert trace.fixed_point == x0
        assert trace.steps == 0

    def test_constant_map(self):
        """A constant map reaches its value in at most one step."""
        trace = picard_iterate(SPACE, SingleValuedMap((1, 1, 1)), 2)
        assert trace.fixed_point == 1
        assert trace.steps <= 1

    def test_cycle_stalls(self):
        """A swap revisits its start and is flagged stalled."""
        space = FiniteMetricSpace.on_line([0, 1])
        trace = picard_iterate(space, SingleValuedMap((1, 0)), 0)
        assert trace.points == [0, 1, 0]
        assert trace.termination == STALLED
        assert trace.fixed_point is None

    def test_max_iter(self):
        """Exhausting max_iter is flagged, not raised."""
        trace = picard_iterate(SPACE, T, 2, stop=StopRule(max_iter=1))
        assert trace.points == [2, 1]
        assert trace.termination == MAX_ITER

    def test_bad_stop_rule(self):
        """max_iter must be positive."""
        with pytest.raises(InputError):
            StopRule(max_iter=0)

    def test_bad_start(self):
        """Start indices must lie in the space."""
        with pytest.raises(InputError):
            picard_iterate(SPACE, T, 3)

    def test_gauge_potentials(self):
        """With banach(0.5) the potential is Phi(d) = 4d along the steps."""
        trace = picard_iterate(SPACE, T, 2, gauge=banach(0.5))
        assert trace.certified is True
        assert trace.potential == [8.0, 4.0, 0.0]
        assert trace.theta == {"kind": "banach", "params": {"alpha": 0.75}}

    def test_strict_refuses_uncertified(self):
        """Strict mode refuses a map the gauge does not certify."""
        with pytest.raises(PreconditionError):
            picard_iterate(SPACE, SingleValuedMap((0, 1, 2)), 0, gauge=banach(0.5), strict=True)

    def test_uncertified_runs(self):
        """Without strict mode an uncertified map still iterates."""
        trace = picard_iterate(SPACE, SingleValuedMap((1, 0, 2)), 0, gauge=banach(0.5))
        assert trace.certified is False
        assert trace.termination == STALLED

    def test_strict_needs_a_certificate(self):
        """Strict mode refuses to iterate with nothing to certify against."""
        with pytest.raises(PreconditionError):
            picard_iterate(SPACE, T, 2, strict=True)

    def test_no_certificate_is_noted(self):
        """Orbits run without a gauge or potential say so."""
        trace = picard_iterate(SPACE, T, 2)
        assert trace.certified is None
        assert UNCERTIFIED_NOTE in trace.notes
        assert UNCERTIFIED_NOTE not in picard_iterate(SPACE, T, 2, gauge=banach(0.5)).notes

    def test_runner_reused_across_starts(self):
        """One certified runner gives the same orbits as per-start calls."""
        runner = picard_runner(SPACE, T, gauge=banach(0.5))
        assert runner.certified is True
        for x0 in range(SPACE.n):
            expected = picard_iterate(SPACE, T, x0, gauge=banach(0.5))
            trace = runner.run(x0)
            assert trace.points == expected.points
            assert trace.potential == expected.potential

    def test_caristi_potential(self):
        """A certified table potential is recorded and caps max_iter at n."""
        phi = PointPotential((0.0, 2.0, 6.0))
        trace = picard_iterate(SPACE, T, 2, potential=phi)
        assert trace.caristi_values == [6.0, 2.0, 0.0, 0.0]
        assert trace.certified is True
        assert trace.fixed_point == 0

    def test_needs_single_valued(self):
        """picard_iterate refuses set-valued maps."""
        with pytest.raises(InputError):
            picard_iterate(SPACE, T.as_multivalued(), 0)

    def test_to_dict_labels(self):
        """Serialized traces carry point labels."""
        data = picard_iterate(SPACE, T, 2).to_dict(SPACE)
        assert data["labels"] == ["3", "1", "0", "0"]
        assert data["fixed_point"] == 0
        assert data["termination"] == "fixed-point"

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, n=st.integers(min_value=2, max_value=10))
    def test_banach_orbits(self, seed, n):
        """Certified orbits shrink geometrically and end at the unique fixed point."""
        rng = np.random.default_rng(seed)
        space = random_space(rng, n)
        alpha = 0.9
        for _ in range(10):
            S = random_self_map(rng, n, max_image=2)
            if not certify_map(space, S, "banach", gauge=banach(alpha)).passed:
                continue
            fixed = brute_force_fixed_points(space, S)
            assert len(fixed) == 1
            for x0 in range(n):
                trace = picard_iterate(space, S, x0, gauge=banach(alpha))
                assert trace.fixed_point == fixed[0]
                for a, b in zip(trace.step_dist, trace.step_dist[1:]):
                    assert b <= alpha * a + 1e-12
                assert audit_telescoping(space, trace) == []

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, n=st.integers(min_value=2, max_value=10))
    def test_caristi_descent(self, seed, n):
        """Caristi-certified orbits descend to a fixed point in at most n - 1 steps."""
        rng = np.random.default_rng(seed)
        space = random_space(rng, n)
        for _ in range(10):
            S = random_self_map(rng, n)
            phi = orbit_potential(space, S)
            if phi is None:
                continue
            assert certify_map(space, S, "caristi", potential=phi).passed
            for x0 in range(n):
                trace = picard_iterate(space, S, x0, potential=phi)
                assert trace.termination == FIXED_POINT
                assert trace.steps <= n - 1
                values = trace.caristi_values
                for k, d in enumerate(trace.step_dist):
                    assert values[k + 1] <= values[k] - d


class TestMultivaluedOrbit:
    """Test gauge-guided orbits of set-valued maps."""

    def assert_orbit_invariants(self, space, M, eta, grid):
        runner = multivalued_runner(space, M, midpoint_gauge(eta, grid, strict=False), eta=eta, grid=grid)
        assert runner.certified is True
        fixed = brute_force_fixed_points(space, M)
        for x0 in range(space.n):
            trace = runner.run(x0)
            assert trace.termination == FIXED_POINT
            assert trace.fixed_point in fixed
            assert all(b <= a + 1e-9 for a, b in zip(trace.potential, trace.potential[1:]))
            assert audit_telescoping(space, trace) == []

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, n=st.integers(min_value=3, max_value=8))
    def test_certified_orbits_reach_oracle_fixed_points(self, seed, n):
        """eta-certified set-valued orbits end at a fixed point of the oracle with non-increasing Phi."""
        rng = np.random.default_rng(seed)
        space = random_space(rng, n)
        grid = default_grid(space)
        eta = banach(0.9)
        for _ in range(10):
            M = random_multivalued_map(rng, n, pool_size=int(rng.integers(1, 3)))
            if certify_map(space, M, "eta", gauge=eta, grid=grid).passed:
                self.assert_orbit_invariants(space, M, eta, grid)

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, n=st.integers(min_value=3, max_value=8), alpha=st.floats(min_value=0.05, max_value=0.5))
    def test_weak_contractions_through_reduction(self, seed, n, alpha):
        """Weak-certified set-valued maps are eta-certified under weak_to_gauge and their orbits behave."""
        rng = np.random.default_rng(seed)
        space = random_space(rng, n)
        grid = default_grid(space)
        weak = make_gauge("weak-theta", {"alpha": alpha})
        for _ in range(10):
            M = random_multivalued_map(rng, n, pool_size=int(rng.integers(1, 3)))
            if not certify_map(space, M, "weak", gauge=weak, grid=grid).passed:
                continue
            eta = weak_to_gauge(weak, grid)
            assert certify_map(space, M, "eta", gauge=eta, grid=grid).passed
            self.assert_orbit_invariants(space, M, eta, grid)

    def test_constant_set_under_weak_reduction(self):
        """A constant set map is weak-certified and reaches its set through the reduced gauge."""
        M = MultiValuedMap(((1,), (1,), (1,)))
        grid = default_grid(SPACE)
        weak = make_gauge("weak-theta", {"alpha": 0.3})
        assert certify_map(SPACE, M, "weak", gauge=weak, grid=grid).passed
        self.assert_orbit_invariants(SPACE, M, weak_to_gauge(weak, grid), grid)

    def test_singleton_images(self):
        """Singleton images reduce to the single-valued orbit without the repeated point."""
        eta = banach(0.5)
        trace = multivalued_orbit(SPACE, T.as_multivalued(), 2, midpoint_gauge(eta, [1.0, 2.0, 3.0]), eta=eta)
        assert trace.points == [2, 1, 0]
        assert trace.fixed_point == 0
        assert trace.certified is True
        assert trace.relaxed_steps == []

    def test_constant_set(self):
        """A constant set map reaches its set in at most one step."""
        M = MultiValuedMap(((1,), (1,), (1,)))
        trace = multivalued_orbit(SPACE, M, 2, banach(0.5))
        assert trace.fixed_point == 1
        assert trace.steps <= 1

    def test_membership_first(self):
        """x in T(x) stops immediately."""
        M = MultiValuedMap(((0, 1), (1, 2), (2, 0)))
        trace = multivalued_orbit(SPACE, M, 1, banach(0.5))
        assert trace.points == [1]
        assert trace.termination == FIXED_POINT
        assert trace.steps == 0

    def test_nearest_selection_lowest_index(self):
        """The nearest point is selected, lowest index on ties."""
        space = FiniteMetricSpace.on_line([0, 1, 2])
        M = MultiValuedMap(((0,), (0, 2), (2,)))
        trace = multivalued_orbit(space, M, 1, banach(0.5))
        assert trace.points[:2] == [1, 0]

    def test_relaxed_equality(self):
        """A selection meeting theta with equality is recorded as relaxed."""
        theta = banach(0.5)
        trace = multivalued_orbit(SPACE, T.as_multivalued(), 2, theta)
        assert trace.relaxed_steps == [1]
        assert RELAXED_NOTE in trace.notes

    def test_certified_violation_raises(self):
        """A certified orbit that breaks a tighter selection bound raises."""
        with pytest.raises(CertificationViolationError) as info:
            multivalued_orbit(SPACE, T.as_multivalued(), 2, banach(0.1), eta=banach(0.5))
        assert info.value.edge == (2, 1)
        assert info.value.selected == 0

    def test_uncertified_violation_is_noted(self):
        """Without a certificate the broken bound becomes a note."""
        trace = multivalued_orbit(SPACE, T.as_multivalued(), 2, banach(0.1))
        assert trace.certified is False
        assert trace.fixed_point == 0
        assert any("exceeds theta" in note for note in trace.notes)

    def test_strict_refuses_uncertified(self):
        """Strict mode refuses uncertified set-valued maps."""
        with pytest.raises(PreconditionError):
            multivalued_orbit(SPACE, T.as_multivalued(), 2, banach(0.1), strict=True)


class TestTelescoping:
    """Test the telescoping bound and its audit."""

    def test_example_bound(self):
        """bound(0, 1) = Phi(2) - Phi(1) = 8 - 4 = 4 >= d(3, 1) = 2."""
        trace = picard_iterate(SPACE, T, 2, gauge=banach(0.5))
        assert telescoping_bound(trace, 0, 1) == 4.0
        assert telescoping_bound(trace, 1, 1) == 0.0
        assert telescoping_bound(trace, 0, 2) >= SPACE.dist[2, 0]
        assert audit_telescoping(SPACE, trace) == []

    def test_caristi_trace_audited(self):
        """Point potential traces satisfy d(x_n, x_m) <= phi(x_n) - phi(x_m)."""
        trace = picard_iterate(SPACE, T, 2, potential=PointPotential((0.0, 2.0, 6.0)))
        assert trace.potential is None
        assert audit_telescoping(SPACE, trace) == []

    def test_caristi_violation_reported(self):
        """A phi drop smaller than the distance travelled is reported."""
        trace = IterationTrace(points=[2, 1, 0], caristi_values=[6.0, 5.5, 5.0])
        violations = audit_telescoping(SPACE, trace)
        assert violations[0] == {"n": 0, "m": 1, "d": 2.0, "bound": 0.5, "potential": "phi"}
        assert {(v["n"], v["m"]) for v in violations} == {(0, 1), (0, 2), (1, 2)}

    def test_needs_potentials(self):
        """Traces without a gauge have no bound."""
        with pytest.raises(InputError):
            telescoping_bound(picard_iterate(SPACE, T, 2), 0, 1)

    @pytest.mark.parametrize("n,m", [(1, 0), (-1, 1), (0, 3)], ids=["reversed", "negative", "past-end"])
    def test_bad_indices(self, n, m):
        """Indices must satisfy 0 <= n <= m < len(potential)."""
        trace = picard_iterate(SPACE, T, 2, gauge=banach(0.5))
        with pytest.raises(InputError):
            telescoping_bound(trace, n, m)


class TestBruteForce:
    """Test the fixed-point oracle."""

    def test_identity(self):
        """Every point of the identity is fixed."""
        assert brute_force_fixed_points(SPACE, SingleValuedMap((0, 1, 2))) == (0, 1, 2)

    def test_example(self):
        """The example map fixes only 0."""
        assert brute_force_fixed_points(SPACE, T) == (0,)

    def test_swap(self):
        """A swap has no fixed points."""
        space = FiniteMetricSpace.on_line([0, 1])
        assert brute_force_fixed_points(space, SingleValuedMap((1, 0))) == ()

    def test_multivalued(self):
        """x is fixed iff x is in T(x)."""
        M = MultiValuedMap(((1,), (1, 2), (0,)))
        assert brute_force_fixed_points(SPACE, M) == (1,)
