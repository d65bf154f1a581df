"""
Tests for exhaustive certification of contraction conditions.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import InputError
from gauges import (
    PairPotential,
    PointPotential,
    certify_map,
    condition_gauge_report,
    contraction_ratio,
    default_grid,
    make_gauge,
    midpoint_gauge,
    pair_potential_from_gauge,
    recheck_witness,
)
from gauges.certify import MEIR_KEELER_NOTE, RHOADES_NOTE, Witness
from metric_core import FiniteMetricSpace, MultiValuedMap, SingleValuedMap, random_self_map, random_space

seeds = st.integers(min_value=0, max_value=2**32 - 1)

# {0, 1, 3} on the line; T: 3 -> 1, 1 -> 0, 0 -> 0
SPACE = FiniteMetricSpace.on_line([0, 1, 3])
T = SingleValuedMap((0, 0, 1))
IDENTITY = SingleValuedMap((0, 1, 2))


def banach(alpha):
    return make_gauge("banach", {"alpha": alpha})


class TestWitness:
    """Test witness records."""

    def test_margin(self):
        """margin is lhs - rhs, and absent without both sides."""
        assert Witness(points=(0, 1), lhs=3.0, rhs=1.0).margin == 2.0
        assert Witness(t=0.5).margin is None

    def test_failed_property_serializes_as_property(self):
        """Property failures report under the "property" key."""
        out = Witness(t=0.5, failed_property="phi(s)<s", data={"value": 0.5}).to_dict()
        assert out == {"t": 0.5, "property": "phi(s)<s", "points": [], "data": {"value": 0.5}}


class TestGaugeConditions:
    """Test gauge-bounded conditions on the three-point example."""

    def test_banach_pass(self):
        """The example map is a 1/2 contraction."""
        cert = certify_map(SPACE, T, "banach", gauge=banach(0.5), map_name="T")
        assert cert.passed
        assert cert.verdict == "pass"
        assert cert.pairs_checked == 6
        assert cert.witness is None

    def test_contraction_ratio(self):
        """The smallest passing alpha is 1/2."""
        assert contraction_ratio(SPACE, T) == 0.5
        assert not certify_map(SPACE, T, "banach", gauge=banach(0.49)).passed

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 0.99], ids=["zero", "half", "near-one"])
    def test_identity_fails(self, alpha):
        """The identity is never a Banach contraction."""
        cert = certify_map(SPACE, IDENTITY, "banach", gauge=banach(alpha))
        assert not cert.passed
        x, y = cert.witness.points
        assert x != y
        assert cert.witness.lhs == SPACE.dist[x, y]
        assert recheck_witness(SPACE, IDENTITY, cert, gauge=banach(alpha))

    def test_first_witness_in_row_major_order(self):
        """The witness is the first violating ordered pair."""
        cert = certify_map(SPACE, IDENTITY, "banach", gauge=banach(0.5))
        assert cert.witness.points == (0, 1)

    @pytest.mark.parametrize(
        "condition,gauge",
        [
            ("eta", ("banach", {"alpha": 0.5})),
            ("eta", ("rho-section3", {})),
            ("weak", ("weak-theta", {"alpha": 0.5})),
            ("mizoguchi-takahashi", ("mizoguchi-takahashi", {"alpha": 0.5})),
            ("rhoades", ("rhoades", {"alpha": 0.5})),
            ("boyd-wong", ("rho-section3", {})),
            ("l-function", ("banach", {"alpha": 0.9})),
        ],
        ids=["eta-banach", "eta-rho", "weak", "mt", "rhoades", "boyd-wong", "l-function"],
    )
    def test_example_passes(self, condition, gauge):
        """The example map passes every gauge condition with a suitable gauge."""
        kind, params = gauge
        cert = certify_map(SPACE, T, condition, gauge=make_gauge(kind, params))
        assert cert.passed, cert.to_dict()

    def test_rhoades_note(self):
        """Rhoades certificates carry the remainder requirement."""
        cert = certify_map(SPACE, T, "rhoades", gauge=make_gauge("rhoades", {"alpha": 0.5}))
        assert RHOADES_NOTE in cert.notes

    def test_l_function_is_strict(self):
        """Equality D = phi(d) fails the strict L-function inequality but passes boyd-wong."""
        rho = make_gauge("rho-section3")
        # d(3, 1) = 2 and d(T3, T1) = d(1, 0) = 1 = rho(2)
        assert certify_map(SPACE, T, "boyd-wong", gauge=rho).passed
        cert = certify_map(SPACE, T, "l-function", gauge=rho)
        assert not cert.passed
        assert cert.witness.lhs == cert.witness.rhs

    def test_boyd_wong_rejects_identity_gauge(self):
        """phi(s) < s is required."""
        cert = certify_map(SPACE, T, "boyd-wong", gauge=make_gauge("eta-contraction", fn=lambda t: t))
        assert not cert.passed
        assert cert.witness.failed_property == "phi(s)<s"

    def test_gauge_failure_fails_certificate(self):
        """A gauge failing its class properties fails the certificate even when the scan passes."""
        constant = SingleValuedMap((0, 0, 0))
        identity_gauge = make_gauge("eta-contraction", fn=lambda t: t)
        cert = certify_map(SPACE, constant, "eta", gauge=identity_gauge)
        assert not cert.passed
        assert cert.witness.failed_property == "eta(t)<t"
        assert cert.gauge_report is not None and not cert.gauge_report.ok

    def test_kind_mismatch(self):
        """A weak gauge cannot certify the eta condition."""
        with pytest.raises(InputError):
            certify_map(SPACE, T, "eta", gauge=make_gauge("weak-theta", {"alpha": 0.5}))

    def test_missing_gauge(self):
        """Gauge conditions need a gauge."""
        with pytest.raises(InputError):
            certify_map(SPACE, T, "banach")

    def test_unknown_condition(self):
        """Unknown condition names are input errors."""
        with pytest.raises(InputError):
            certify_map(SPACE, T, "contractive-ish", gauge=banach(0.5))

    def test_multivalued(self):
        """Set-valued maps are certified with the Hausdorff distance."""
        M = MultiValuedMap(((0,), (0, 1), (0,)))
        # H({0}, {0, 1}) = 1 = d(0, 1): not a contraction
        assert not certify_map(SPACE, M, "banach", gauge=banach(0.9)).passed
        assert certify_map(SPACE, T.as_multivalued(), "banach", gauge=banach(0.5)).passed

    def test_shared_gauge_report(self):
        """A report computed once per gauge gives every map the same verdict."""
        grid = default_grid(SPACE)
        report = condition_gauge_report("banach", banach(0.5), grid)
        assert report.ok
        for M in (T, IDENTITY):
            shared = certify_map(SPACE, M, "banach", gauge=banach(0.5), grid=grid, gauge_report=report)
            fresh = certify_map(SPACE, M, "banach", gauge=banach(0.5), grid=grid)
            assert shared.passed == fresh.passed
            assert shared.gauge_report is report

    def test_shared_gauge_report_failure(self):
        """A failing shared report still fails a map whose scan passes."""
        identity_gauge = make_gauge("eta-contraction", fn=lambda t: t)
        report = condition_gauge_report("eta", identity_gauge, default_grid(SPACE))
        cert = certify_map(SPACE, SingleValuedMap((0, 0, 0)), "eta", gauge=identity_gauge, gauge_report=report)
        assert not cert.passed
        assert cert.witness.failed_property == "eta(t)<t"

    @pytest.mark.parametrize("condition", ["meir-keeler", "boyd-wong", "caristi"])
    def test_condition_without_gauge_report(self, condition):
        """Conditions that check no class properties have no report to share."""
        with pytest.raises(InputError):
            condition_gauge_report(condition, banach(0.5), default_grid(SPACE))

    def test_to_dict(self):
        """Reports include the verdict, gauge and witness."""
        data = certify_map(SPACE, IDENTITY, "banach", gauge=banach(0.5), map_name="I").to_dict()
        assert data["verdict"] == "fail"
        assert data["map"] == "I"
        assert data["gauge"] == {"kind": "banach", "params": {"alpha": 0.5}}
        assert data["witness"]["points"] == [0, 1]


class TestMeirKeeler:
    """Test the Meir-Keeler delta search."""

    def test_banach_map_passes(self):
        """Every epsilon gets a delta inside the Banach window."""
        cert = certify_map(SPACE, T, "meir-keeler", gauge=banach(0.5))
        assert cert.passed
        assert MEIR_KEELER_NOTE in cert.notes
        assert sorted(cert.deltas) == [1.0, 2.0, 3.0]
        for eps, delta in cert.deltas.items():
            assert delta > 0
            assert 0.5 * (eps + delta) < eps

    def test_identity_fails(self):
        """The identity has d(Tx, Ty) = eps on the window."""
        cert = certify_map(SPACE, IDENTITY, "meir-keeler")
        assert not cert.passed
        assert cert.witness.epsilon is not None
        assert recheck_witness(SPACE, IDENTITY, cert)

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, n=st.integers(min_value=2, max_value=8))
    def test_banach_implies_meir_keeler(self, seed, n):
        """Every banach-certified random map passes meir-keeler with alpha(eps + delta) < eps."""
        rng = np.random.default_rng(seed)
        space = random_space(rng, n)
        for _ in range(10):
            S = random_self_map(rng, n, max_image=2)
            if not certify_map(space, S, "banach", gauge=banach(0.9)).passed:
                continue
            cert = certify_map(space, S, "meir-keeler", gauge=banach(0.9))
            assert cert.passed
            for eps, delta in cert.deltas.items():
                assert 0.9 * (eps + delta) < eps


class TestCaristi:
    """Test the one- and two-variable Caristi conditions."""

    def test_table_potential_passes(self):
        """phi = 2 d(x, 0) = {0, 2, 6} certifies the example map."""
        cert = certify_map(SPACE, T, "caristi", potential=PointPotential((0.0, 2.0, 6.0)))
        assert cert.passed
        assert cert.pairs_checked == 3

    def test_table_potential_fails(self):
        """phi(3) = 3 is too small: d(3, 1) = 2 > 3 - 2."""
        potential = PointPotential((0.0, 2.0, 3.0))
        cert = certify_map(SPACE, T, "caristi", potential=potential)
        assert not cert.passed
        assert cert.witness.points == (2,)
        assert recheck_witness(SPACE, T, cert, potential=potential)

    def test_caristi_needs_single_valued(self):
        """Caristi conditions are for single-valued maps."""
        with pytest.raises(InputError):
            certify_map(SPACE, T.as_multivalued(), "caristi", potential=PointPotential((0.0, 2.0, 6.0)))

    def test_potential_type(self):
        """The two-variable condition needs a pair potential."""
        with pytest.raises(InputError):
            certify_map(SPACE, T, "caristi-two-var", potential=PointPotential((0.0, 2.0, 6.0)))

    def test_two_variable_from_gauge(self):
        """Phi from the midpoint of banach(0.5) certifies the example map."""
        theta = midpoint_gauge(banach(0.5), SPACE.distinct_distances())
        cert = certify_map(SPACE, T, "caristi-two-var", potential=pair_potential_from_gauge(SPACE, theta))
        assert cert.passed

    def test_two_variable_fails_for_identity(self):
        """No potential drop for the identity."""
        pair = PairPotential(np.asarray(SPACE.dist) * 4.0)
        cert = certify_map(SPACE, IDENTITY, "caristi-two-var", potential=pair)
        assert not cert.passed
        assert recheck_witness(SPACE, IDENTITY, cert, potential=pair)

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, n=st.integers(min_value=2, max_value=8))
    def test_eta_implies_two_variable(self, seed, n):
        """eta-certified maps pass caristi-two-var with the midpoint potential."""
        rng = np.random.default_rng(seed)
        space = random_space(rng, n)
        eta = banach(0.8)
        theta = midpoint_gauge(eta, space.distinct_distances())
        pair = pair_potential_from_gauge(space, theta)
        for _ in range(10):
            S = random_self_map(rng, n, max_image=2)
            if certify_map(space, S, "eta", gauge=eta).passed:
                assert certify_map(space, S, "caristi-two-var", potential=pair).passed

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, n=st.integers(min_value=2, max_value=8))
    def test_banach_implies_eta(self, seed, n):
        """A banach(alpha) pass implies an eta pass with eta = alpha t."""
        rng = np.random.default_rng(seed)
        space = random_space(rng, n)
        alpha = float(rng.uniform(0.1, 0.95))
        for _ in range(10):
            S = random_self_map(rng, n, max_image=3)
            if certify_map(space, S, "banach", gauge=banach(alpha)).passed:
                eta = make_gauge("eta-contraction", {"alpha": alpha})
                assert certify_map(space, S, "eta", gauge=eta).passed
