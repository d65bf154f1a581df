"""Seeded acceptance sweeps over random finite spaces, maps and Bellman problems.

run_selftest() returns a JSON-ready report. Everything except the
"timings" block is a pure function of the seed and the sweep sizes.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from bellman import (
    AffineAggregator,
    BellmanProblem,
    certify_bellman,
    random_affine_problem,
    recheck_bellman_witness,
    solve_bellman,
)
from errors import CertificationViolationError
from gauges import (
    Gauge,
    GaugeReport,
    PointPotential,
    certify_map,
    condition_gauge_report,
    default_grid,
    make_gauge,
    midpoint_gauge,
    mt_to_gauge,
    recheck_witness,
    weak_to_gauge,
)
from iterate import (
    FIXED_POINT,
    audit_telescoping,
    brute_force_fixed_points,
    multivalued_runner,
    picard_runner,
)
from metric_core import (
    FiniteMetricSpace,
    SingleValuedMap,
    hausdorff_components,
    hausdorff_distance,
    random_multivalued_map,
    random_point_set,
    random_self_map,
    random_space,
)
from utils import AXIOM_TOL, DEFAULT_SEED, TELESCOPE_TOL, dumps, strip_timings

logger = logging.getLogger(__name__)

BANACH_ALPHA = 0.9
# violations kept per criterion in the report
MAX_EXAMPLES = 5


@dataclass(frozen=True)
class SweepSizes:
    spaces: int = 200
    maps_per_space: int = 50
    multivalued_maps: int = 100
    hausdorff_pairs: int = 1000
    bellman_problems: int = 50
    bellman_samples: int = 64


FULL = SweepSizes()
QUICK = SweepSizes(
    spaces=12, maps_per_space=10, multivalued_maps=12, hausdorff_pairs=60, bellman_problems=5, bellman_samples=16
)


@dataclass
class CriterionResult:
    number: int
    name: str
    checked: int = 0
    violations: int = 0
    examples: list[dict[str, Any]] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def violate(self, **example) -> None:
        self.violations += 1
        if len(self.examples) < MAX_EXAMPLES:
            self.examples.append(example)

    def count(self, key: str, by: int = 1) -> None:
        self.counts[key] = self.counts.get(key, 0) + by

    def to_dict(self):
        return {
            "criterion": self.number,
            "name": self.name,
            "verdict": "pass" if self.passed else "fail",
            "checked": self.checked,
            "violations": self.violations,
            "examples": self.examples,
            "counts": self.counts,
        }


def orbit_potential(space: FiniteMetricSpace, T: SingleValuedMap) -> PointPotential | None:
    """phi(x) = 2 (d(x, Tx) + phi(Tx)), zero at fixed points; None when T has a cycle."""
    phi: dict[int, float] = {}
    for start in range(space.n):
        path = []
        x = start
        while x not in phi and T(x) != x:
            if x in path:
                return None
            path.append(x)
            x = T(x)
        phi.setdefault(x, 0.0)
        for y in reversed(path):
            phi[y] = 2.0 * (float(space.dist[y, T(y)]) + phi[T(y)])
    return PointPotential(tuple(phi[x] for x in range(space.n)), label="orbit")


def hausdorff_oracle(dist: np.ndarray, A, B) -> float:
    """Double-loop max-min, independent of the vectorized implementation."""

    def directed(P, Q):
        worst = 0.0
        for p in P:
            nearest = min(float(dist[p, q]) for q in Q)
            worst = max(worst, nearest)
        return worst

    return max(directed(A, B), directed(B, A))


class SpaceCertifier:
    """certify_map on one space, with its grid and gauge property reports computed once."""

    def __init__(self, space: FiniteMetricSpace):
        self.space = space
        self.grid = default_grid(space)
        self._reports: dict[tuple[str, int], tuple[Gauge, GaugeReport]] = {}

    def report(self, condition: str, gauge: Gauge) -> GaugeReport:
        key = (condition, id(gauge))
        if key not in self._reports:
            self._reports[key] = (gauge, condition_gauge_report(condition, gauge, self.grid))
        return self._reports[key][1]

    def certify(self, T, condition: str, gauge: Gauge):
        return certify_map(
            self.space, T, condition, gauge=gauge, grid=self.grid, gauge_report=self.report(condition, gauge)
        )


class MapSweep:
    """Random spaces and self-maps shared by the Banach, Caristi, reduction and Meir-Keeler criteria."""

    def __init__(self, rng: np.random.Generator, sizes: SweepSizes):
        self.rng = rng
        self.sizes = sizes
        self.banach = make_gauge("banach", {"alpha": BANACH_ALPHA})
        self.oracle = CriterionResult(1, "banach-oracle")
        self.caristi = CriterionResult(2, "caristi-descent")
        self.telescoping = CriterionResult(3, "telescoping-bound")
        self.reductions = CriterionResult(5, "reduction-consistency")
        self.meir_keeler = CriterionResult(6, "meir-keeler-delta")

    def run(self) -> None:
        for s in range(self.sizes.spaces):
            n = int(self.rng.integers(3, 13))
            certifier = SpaceCertifier(random_space(self.rng, n))
            weak = make_gauge("weak-theta", {"alpha": float(self.rng.uniform(0.05, 0.5))})
            mt = make_gauge("mizoguchi-takahashi", {"alpha": float(self.rng.uniform(0.5, 0.95))})
            reduced = {
                "weak": (weak, weak_to_gauge(weak, certifier.grid)),
                "mizoguchi-takahashi": (mt, mt_to_gauge(mt, certifier.grid)),
            }
            for m in range(self.sizes.maps_per_space):
                T = random_self_map(self.rng, n, max_image=int(self.rng.integers(1, 4)))
                where = {"space": s, "map": m}
                self.check_banach(certifier, T, where)
                self.check_caristi(certifier.space, T, where)
                self.check_reductions(certifier, T, reduced, where)

    def check_banach(self, certifier: SpaceCertifier, T, where) -> None:
        space = certifier.space
        cert = certifier.certify(T, "banach", self.banach)
        if not cert.passed:
            self.oracle.count("witness_rechecks")
            if not recheck_witness(space, T, cert, gauge=self.banach):
                self.oracle.violate(kind="witness does not reproduce", **where)
            return
        self.oracle.checked += 1
        fixed = brute_force_fixed_points(space, T)
        if len(fixed) != 1:
            self.oracle.violate(kind="fixed point count", fixed=list(fixed), **where)
            return
        runner = picard_runner(
            space, T, gauge=self.banach, grid=certifier.grid, gauge_report=certifier.report("eta", self.banach)
        )
        for x0 in range(space.n):
            trace = runner.run(x0)
            if trace.fixed_point != fixed[0]:
                self.oracle.violate(kind="orbit mismatch", start=x0, termination=trace.termination, **where)
            self.audit(space, trace, dict(where, start=x0))

        self.meir_keeler.checked += 1
        mk = certify_map(space, T, "meir-keeler", gauge=self.banach, grid=certifier.grid)
        if not mk.passed:
            self.meir_keeler.violate(kind="certificate failed", witness=mk.witness.to_dict(), **where)
        for eps, delta in mk.deltas.items():
            self.meir_keeler.count("deltas")
            if not BANACH_ALPHA * (eps + delta) < eps:
                self.meir_keeler.violate(kind="delta too wide", epsilon=eps, delta=delta, **where)

    def check_caristi(self, space, T, where) -> None:
        phi = orbit_potential(space, T)
        if phi is None:
            self.caristi.count("cyclic_maps")
            return
        cert = certify_map(space, T, "caristi", potential=phi)
        if not cert.passed:
            self.caristi.violate(kind="orbit potential rejected", witness=cert.witness.to_dict(), **where)
            return
        self.caristi.checked += 1
        runner = picard_runner(space, T, potential=phi)
        for x0 in range(space.n):
            trace = runner.run(x0)
            if trace.termination != FIXED_POINT or trace.steps > space.n - 1:
                self.caristi.violate(kind="no descent to a fixed point", start=x0, steps=trace.steps, **where)
                continue
            values = trace.caristi_values
            for k, d in enumerate(trace.step_dist):
                if values[k] - values[k + 1] < d:
                    self.caristi.violate(kind="potential drop below step", start=x0, step=k, **where)
            self.telescoping.count("caristi_traces")
            self.audit(space, trace, dict(where, start=x0))

    def check_reductions(self, certifier: SpaceCertifier, T, reduced, where) -> None:
        for condition, (gauge, eta) in reduced.items():
            if not certifier.certify(T, condition, gauge).passed:
                continue
            self.reductions.checked += 1
            self.reductions.count(condition)
            if not certifier.certify(T, "eta", eta).passed:
                self.reductions.violate(kind=condition, **where)

    def audit(self, space, trace, where) -> None:
        self.telescoping.checked += 1
        for v in audit_telescoping(space, trace, TELESCOPE_TOL):
            self.telescoping.violate(kind="telescoping", **where, **v)


def check_multivalued_orbits(space, T, eta: Gauge, grid, result: CriterionResult, where) -> None:
    """Certified set-valued orbits end at an oracle fixed point with non-increasing Phi and telescoping steps."""
    runner = multivalued_runner(space, T, midpoint_gauge(eta, grid, strict=False), eta=eta, grid=grid)
    fixed = brute_force_fixed_points(space, T)
    for x0 in range(space.n):
        at = dict(where, start=x0)
        result.checked += 1
        try:
            trace = runner.run(x0)
        except CertificationViolationError as e:
            result.violate(kind="selection bound", step=e.step, **at)
            continue
        if trace.fixed_point is None or trace.fixed_point not in fixed:
            result.violate(kind="orbit end", termination=trace.termination, end=trace.points[-1], **at)
        potential = trace.potential or []
        for k in range(len(potential) - 1):
            if potential[k + 1] > potential[k] + TELESCOPE_TOL:
                result.violate(kind="potential increased", step=k, **at)
        for v in audit_telescoping(space, trace, TELESCOPE_TOL):
            result.violate(kind="telescoping", **at, **v)


def multivalued_sweep(
    rng: np.random.Generator, sizes: SweepSizes, telescoping: CriterionResult, reductions: CriterionResult
) -> None:
    """Random set-valued maps, checked as eta-contractions and through weak_to_gauge.

    eta-certified orbits count toward the telescoping criterion; weak-certified
    maps count toward reduction consistency.
    """
    eta = make_gauge("banach", {"alpha": BANACH_ALPHA})
    certified = 0
    weak_certified = 0
    attempts = 0
    while certified < sizes.multivalued_maps and attempts < 50 * sizes.multivalued_maps:
        attempts += 1
        n = int(rng.integers(3, 11))
        space = random_space(rng, n)
        T = random_multivalued_map(rng, n, pool_size=int(rng.integers(1, 3)))
        weak = make_gauge("weak-theta", {"alpha": float(rng.uniform(0.05, 0.5))})
        grid = default_grid(space)
        where = {"multivalued_map": attempts}
        if certify_map(space, T, "eta", gauge=eta, grid=grid).passed:
            certified += 1
            check_multivalued_orbits(space, T, eta, grid, telescoping, where)
        if certify_map(space, T, "weak", gauge=weak, grid=grid).passed:
            weak_certified += 1
            eta_weak = weak_to_gauge(weak, grid)
            if not certify_map(space, T, "eta", gauge=eta_weak, grid=grid).passed:
                reductions.checked += 1
                reductions.violate(kind="multivalued weak", **where)
                continue
            check_multivalued_orbits(space, T, eta_weak, grid, reductions, where)
    telescoping.count("multivalued_certified", certified)
    telescoping.count("multivalued_attempts", attempts)
    reductions.count("multivalued_weak_certified", weak_certified)


def hausdorff_criterion(rng: np.random.Generator, sizes: SweepSizes) -> CriterionResult:
    result = CriterionResult(4, "hausdorff-oracle")
    for i in range(sizes.hausdorff_pairs):
        n = int(rng.integers(1, 11))
        space = random_space(rng, n)
        A, B, C = (random_point_set(rng, n) for _ in range(3))
        result.checked += 1
        h_ab = hausdorff_distance(space, A, B)
        if h_ab != hausdorff_oracle(space.dist, A, B):
            result.violate(kind="oracle", trial=i)
        forward, backward = hausdorff_components(space, A, B)
        if abs(h_ab - hausdorff_distance(space, B, A)) > AXIOM_TOL or h_ab != max(forward, backward):
            result.violate(kind="symmetry", trial=i)
        if h_ab > hausdorff_distance(space, A, C) + hausdorff_distance(space, C, B) + AXIOM_TOL:
            result.violate(kind="triangle", trial=i)
    return result


def bellman_convergence_criterion(rng: np.random.Generator, sizes: SweepSizes) -> CriterionResult:
    result = CriterionResult(7, "bellman-convergence")
    single = BellmanProblem(("w",), ("y",), [[1.0]], [[0]], AffineAggregator(0.0, 0.5))
    h, _ = solve_bellman(single, [0.0], tol=1e-12)
    result.checked += 1
    if abs(h.values[0] - 2.0) > 1e-10:
        result.violate(kind="closed form", value=float(h.values[0]))
    for i in range(sizes.bellman_problems):
        problem = random_affine_problem(
            rng, int(rng.integers(1, 21)), int(rng.integers(1, 21)), float(rng.uniform(0.0, BANACH_ALPHA))
        )
        cert = certify_bellman(problem, sizes.bellman_samples, seed=int(rng.integers(0, 2**32)))
        result.checked += 1
        if cert.certified != "banach-beta":
            result.violate(kind="not banach-beta certified", problem=i, certified=cert.certified)
            continue
        _, trace = solve_bellman(problem, rng.uniform(-1.0, 1.0, problem.n_states), tol=1e-10, certificate=cert)
        for n, (a, b) in enumerate(zip(trace.deltas, trace.deltas[1:])):
            if b > cert.beta * a + AXIOM_TOL:
                result.violate(kind="delta ratio", problem=i, step=n)
        if not trace.converged or trace.residual > 1e-8:
            result.violate(kind="residual", problem=i, residual=trace.residual)
    return result


def degeneracy_criterion(seed: int, sizes: SweepSizes) -> CriterionResult:
    result = CriterionResult(8, "strict-rho-degeneracy")
    problem = BellmanProblem(("w",), ("y",), [[1.0]], [[0]], AffineAggregator(0.0, 0.5))
    cert = certify_bellman(problem, sizes.bellman_samples, seed=seed)
    result.checked += 1
    if cert.strict_rho.passed:
        result.violate(kind="strict-rho passed")
    elif not recheck_bellman_witness(problem, cert.strict_rho):
        result.violate(kind="witness does not reproduce", witness=cert.strict_rho.witness.to_dict())
    if not cert.banach_beta.passed or cert.beta != 0.5:
        result.violate(kind="banach-beta", beta=cert.beta)
    result.counts["strict_rho_pairs"] = cert.strict_rho.pairs_checked
    return result


def run_criteria(seed: int, sizes: SweepSizes) -> tuple[list[CriterionResult], dict[str, float]]:
    timings = {}
    start = time.perf_counter()
    sweep = MapSweep(np.random.default_rng([seed, 1]), sizes)
    sweep.run()
    multivalued_sweep(np.random.default_rng([seed, 3]), sizes, sweep.telescoping, sweep.reductions)
    timings["map_sweep"] = time.perf_counter() - start

    start = time.perf_counter()
    hausdorff = hausdorff_criterion(np.random.default_rng([seed, 4]), sizes)
    timings["hausdorff"] = time.perf_counter() - start

    start = time.perf_counter()
    bellman = bellman_convergence_criterion(np.random.default_rng([seed, 7]), sizes)
    degeneracy = degeneracy_criterion(seed, sizes)
    timings["bellman"] = time.perf_counter() - start

    results = [
        sweep.oracle,
        sweep.caristi,
        sweep.telescoping,
        hausdorff,
        sweep.reductions,
        sweep.meir_keeler,
        bellman,
        degeneracy,
    ]
    return results, timings


def _payload(seed: int, quick: bool, results: list[CriterionResult]) -> dict[str, Any]:
    return {
        "seed": seed,
        "quick": quick,
        "criteria": [r.to_dict() for r in results],
    }


def run_selftest(seed: int = DEFAULT_SEED, quick: bool = False) -> dict[str, Any]:
    """Run criteria 1-8, then rerun them to confirm the report is reproducible (criterion 9)."""
    sizes = QUICK if quick else FULL
    logger.info("selftest seed=%d quick=%s", seed, quick)
    results, timings = run_criteria(seed, sizes)
    first = _payload(seed, quick, results)

    start = time.perf_counter()
    rerun, _ = run_criteria(seed, sizes)
    timings["determinism_rerun"] = time.perf_counter() - start
    determinism = CriterionResult(9, "determinism", checked=1)
    if dumps(_payload(seed, quick, rerun)) != dumps(first):
        determinism.violate(kind="rerun differs")

    report = dict(first)
    report["criteria"] = first["criteria"] + [determinism.to_dict()]
    report["passed"] = all(r.passed for r in results) and determinism.passed
    report["timings"] = timings
    for r in results + [determinism]:
        logger.debug("criterion %d %s: %s", r.number, r.name, "pass" if r.passed else "fail")
    return report


def report_body(report: dict[str, Any]) -> str:
    """Canonical JSON of a selftest report without its timings."""
    return dumps(strip_timings(report))
