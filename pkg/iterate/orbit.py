import logging
from dataclasses import dataclass, field
from typing import Any

from errors import CertificationViolationError, InputError, PotentialUndefinedError, PreconditionError
from gauges import (
    Gauge,
    GaugeReport,
    PointPotential,
    caristi_potential,
    certify_map,
    default_grid,
    midpoint_gauge,
)
from metric_core import FiniteMetricSpace, MultiValuedMap, SingleValuedMap
from utils import TELESCOPE_TOL

logger = logging.getLogger(__name__)

FIXED_POINT = "fixed-point"
MAX_ITER = "max-iter"
STALLED = "stalled"

RELAXED_NOTE = (
    "selection accepted d(y,z) <= theta(d(x,y)); the strict bound is unattainable "
    "when the Hausdorff bound is met with equality"
)
UNCERTIFIED_NOTE = "no gauge or potential was given; the orbit ran uncertified"


@dataclass(frozen=True)
class StopRule:
    max_iter: int = 1000
    mode: str = "exact"

    def __post_init__(self):
        if int(self.max_iter) < 1:
            raise InputError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.mode != "exact":
            raise InputError(f"unsupported stop mode {self.mode!r}")


@dataclass
class IterationTrace:
    points: list[int]
    step_dist: list[float] = field(default_factory=list)
    # Phi(x_n, x_{n+1}) per step; None when no gauge was supplied or Phi is undefined.
    potential: list[float] | None = None
    # phi(x_n) per point when a one-variable Caristi table was supplied.
    caristi_values: list[float] | None = None
    termination: str = MAX_ITER
    certified: bool | None = None
    relaxed_steps: list[int] = field(default_factory=list)
    theta: dict[str, Any] | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def fixed_point(self) -> int | None:
        return self.points[-1] if self.termination == FIXED_POINT else None

    @property
    def steps(self) -> int:
        """Moves taken before first arriving at the terminal point."""
        return self.points.index(self.points[-1])

    def to_dict(self, space: FiniteMetricSpace | None = None):
        out = {
            "points": self.points,
            "step_dist": self.step_dist,
            "potential": self.potential,
            "caristi_values": self.caristi_values,
            "termination": self.termination,
            "fixed_point": self.fixed_point,
            "steps": self.steps,
            "certified": self.certified,
            "relaxed_steps": self.relaxed_steps,
            "theta": self.theta,
            "notes": self.notes,
        }
        if space is not None:
            out["labels"] = [space.labels[p] for p in self.points]
        return out


class PicardIteration:
    """
    Runs the orbit x_{n+1} = T(x_n) of a single-valued map.

    (See MultiValuedOrbit for set-valued maps.)
    """

    def __init__(
        self,
        space: FiniteMetricSpace,
        T,
        stop: StopRule | None = None,
        theta: Gauge | None = None,
        potential: PointPotential | None = None,
    ):
        self.space = space
        self.T = T.check_in(space)
        self.stop = stop or StopRule()
        self.theta = theta
        self.potential = potential
        self.max_iter = self.stop.max_iter
        self.certified: bool | None = None
        self.notes: list[str] = []

    def is_fixed(self, x: int) -> bool:
        return self.T(x) == x

    def select(self, trace: IterationTrace, x: int) -> int:
        return self.T(x)

    def record_step(self, trace: IterationTrace, x: int, y: int) -> None:
        d = float(self.space.dist[x, y])
        trace.points.append(y)
        trace.step_dist.append(d)
        if trace.potential is not None:
            try:
                trace.potential.append(caristi_potential(self.theta, d))
            except PotentialUndefinedError as e:
                trace.potential = None
                trace.notes.append(f"potential dropped: {e}")
        if trace.caristi_values is not None:
            trace.caristi_values.append(self.potential[y])

    def new_trace(self, x0: int) -> IterationTrace:
        trace = IterationTrace(points=[x0], certified=self.certified, notes=list(self.notes))
        if self.theta is not None:
            trace.potential = []
            trace.theta = self.theta.describe()
        if self.potential is not None:
            trace.caristi_values = [self.potential[x0]]
        return trace

    def run(self, x0: int) -> IterationTrace:
        x0 = self.space.check_index(x0)
        trace = self.new_trace(x0)
        visited = {x0}
        for _ in range(self.max_iter):
            x = trace.points[-1]
            y = self.select(trace, x)
            self.record_step(trace, x, y)
            if y == x:
                trace.termination = FIXED_POINT
                break
            if y in visited:
                trace.termination = STALLED
                break
            visited.add(y)
        if trace.termination == MAX_ITER and self.max_iter < self.stop.max_iter:
            trace.notes.append(f"max_iter capped at {self.max_iter} by the Caristi certificate")
        logger.debug("orbit from %d: %s after %d points", x0, trace.termination, len(trace.points))
        return trace


class MultiValuedOrbit(PicardIteration):
    """
    Orbit of a set-valued map: from the edge (x, y), pick z in T(y).

    Fixed-point membership is tested before each selection; the selected z
    is the point of T(y) nearest to y, lowest index on ties.
    """

    def is_fixed(self, x: int) -> bool:
        return x in self.T(x)

    def select(self, trace: IterationTrace, y: int) -> int:
        members = self.T(y).members
        z = min(members, key=lambda m: (self.space.dist[y, m], m))
        if self.theta is None or len(trace.points) < 2:
            return z
        x = trace.points[-2]
        bound = self.theta.eval(float(self.space.dist[x, y]))
        step = float(self.space.dist[y, z])
        if step > bound:
            message = f"selected d({y},{z})={step} exceeds theta(d({x},{y}))={bound}"
            if self.certified:
                raise CertificationViolationError(message, len(trace.points) - 1, (x, y), z)
            trace.notes.append(message)
        elif step == bound and step > 0.0:
            trace.relaxed_steps.append(len(trace.points) - 1)
            if RELAXED_NOTE not in trace.notes:
                trace.notes.append(RELAXED_NOTE)
        return z

    def run(self, x0: int) -> IterationTrace:
        x0 = self.space.check_index(x0)
        trace = self.new_trace(x0)
        visited = {x0}
        for _ in range(self.max_iter):
            y = trace.points[-1]
            if self.is_fixed(y):
                trace.termination = FIXED_POINT
                break
            z = self.select(trace, y)
            self.record_step(trace, y, z)
            if z in visited:
                trace.termination = STALLED
                break
            visited.add(z)
        else:
            if self.is_fixed(trace.points[-1]):
                trace.termination = FIXED_POINT
        logger.debug("set-valued orbit from %d: %s after %d points", x0, trace.termination, len(trace.points))
        return trace


def picard_runner(
    space: FiniteMetricSpace,
    T: SingleValuedMap,
    stop: StopRule | None = None,
    gauge: Gauge | None = None,
    potential: PointPotential | None = None,
    strict: bool = False,
    grid=None,
    gauge_report: GaugeReport | None = None,
) -> PicardIteration:
    """Certify T once and return a runner for orbits from any start.

    With a gauge eta, potentials Phi(x_n, x_{n+1}) are recorded using the
    midpoint gauge theta = (eta + t)/2. With a point potential phi that
    passes the Caristi certificate, max_iter is capped at n. gauge_report
    is the precomputed eta property report of gauge on grid.
    """
    if not isinstance(T, SingleValuedMap):
        raise InputError("picard_iterate needs a single-valued map")
    stop = stop or StopRule()
    runner = PicardIteration(space, T, stop)
    certificates = []
    if gauge is not None:
        grid = default_grid(space) if grid is None else grid
        certificates.append(certify_map(space, T, "eta", gauge=gauge, grid=grid, gauge_report=gauge_report))
        runner.theta = midpoint_gauge(gauge, grid=grid, strict=False)
    if potential is not None:
        runner.potential = potential
        caristi = certify_map(space, T, "caristi", potential=potential)
        certificates.append(caristi)
        if caristi.passed:
            runner.max_iter = min(stop.max_iter, space.n)
    if not certificates:
        if strict:
            raise PreconditionError("strict mode needs a gauge or a potential to certify the map against")
        runner.notes.append(UNCERTIFIED_NOTE)
        return runner
    runner.certified = all(c.passed for c in certificates)
    if strict and not runner.certified:
        failed = next(c for c in certificates if not c.passed)
        raise PreconditionError(f"map is not certified for {failed.condition}: witness {failed.witness}")
    return runner


def picard_iterate(
    space: FiniteMetricSpace,
    T: SingleValuedMap,
    x0: int,
    stop: StopRule | None = None,
    gauge: Gauge | None = None,
    potential: PointPotential | None = None,
    strict: bool = False,
) -> IterationTrace:
    """Iterate x_{n+1} = T(x_n) until a fixed point, a cycle, or max_iter."""
    return picard_runner(space, T, stop, gauge=gauge, potential=potential, strict=strict).run(x0)


def multivalued_runner(
    space: FiniteMetricSpace,
    T: MultiValuedMap,
    theta: Gauge,
    stop: StopRule | None = None,
    eta: Gauge | None = None,
    strict: bool = False,
    grid=None,
) -> MultiValuedOrbit:
    """Certify a set-valued map once and return a runner for orbits from any start."""
    if isinstance(T, SingleValuedMap):
        T = T.as_multivalued()
    runner = MultiValuedOrbit(space, T, stop, theta=theta)
    cert = certify_map(space, T, "eta", gauge=eta if eta is not None else theta, grid=grid)
    runner.certified = cert.passed
    if strict and not cert.passed:
        raise PreconditionError(f"set-valued map is not certified: witness {cert.witness}")
    return runner


def multivalued_orbit(
    space: FiniteMetricSpace,
    T: MultiValuedMap,
    x0: int,
    theta: Gauge,
    stop: StopRule | None = None,
    eta: Gauge | None = None,
    strict: bool = False,
) -> IterationTrace:
    """Gauge-guided orbit of a set-valued map.

    theta is the selection bound (usually midpoint_gauge(eta)). The map is
    certified against eta when given, otherwise against theta itself.
    """
    return multivalued_runner(space, T, theta, stop, eta=eta, strict=strict).run(x0)


def telescoping_bound(trace: IterationTrace, n: int, m: int) -> float:
    """Phi(x_n, x_{n+1}) - Phi(x_m, x_{m+1}), an upper bound for d(x_n, x_m)."""
    if trace.potential is None:
        raise InputError("trace has no potentials; run the orbit with a gauge")
    if not 0 <= n <= m < len(trace.potential):
        raise InputError(f"need 0 <= n <= m < {len(trace.potential)}, got n={n}, m={m}")
    return trace.potential[n] - trace.potential[m]


def _audit(space: FiniteMetricSpace, points: list[int], bound, count: int, tol: float, source: str) -> list[dict]:
    violations = []
    for n in range(count):
        for m in range(n + 1, count):
            d = float(space.dist[points[n], points[m]])
            b = bound(n, m)
            if d > b + tol:
                violations.append({"n": n, "m": m, "d": d, "bound": b, "potential": source})
    return violations


def audit_telescoping(space: FiniteMetricSpace, trace: IterationTrace, tol: float = TELESCOPE_TOL) -> list[dict]:
    """All (n, m), n < m, where d(x_n, x_m) exceeds a telescoping bound by more than tol.

    Pair potentials give Phi(x_n, x_{n+1}) - Phi(x_m, x_{m+1}); point
    potential tables give phi(x_n) - phi(x_m).
    """
    violations = []
    if trace.potential is not None:
        violations += _audit(
            space, trace.points, lambda n, m: telescoping_bound(trace, n, m), len(trace.potential), tol, "Phi"
        )
    if trace.caristi_values is not None:
        phi = trace.caristi_values
        violations += _audit(space, trace.points, lambda n, m: phi[n] - phi[m], len(phi), tol, "phi")
    return violations
