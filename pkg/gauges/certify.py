"""Exhaustive certification of contraction conditions on finite spaces.

Every condition is an inequality between the post-map distance D(Tx, Ty)
(d for single-valued maps, the Hausdorff distance for multi-valued ones)
and a bound built from d(x, y), a gauge, or a potential table. A
certificate passes only after all ordered pairs were scanned; a failing
certificate carries the first violating witness in row-major scan order.
"""

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from errors import InputError
from metric_core import FiniteMetricSpace, MultiValuedMap, SingleValuedMap, image_distance_matrix
from utils import AXIOM_TOL, LSC_TOL

from .gauge import (
    BANACH,
    ETA_CONTRACTION,
    MIZOGUCHI_TAKAHASHI,
    RHO_SECTION3,
    RHOADES,
    TABULATED,
    WEAK_THETA,
    Gauge,
    GaugeReport,
    PropertyCheck,
    check_gauge_properties,
    default_grid,
    jump_excess,
    validate_grid,
)
from .potential import PairPotential, PointPotential

logger = logging.getLogger(__name__)

CARISTI = "caristi"
CARISTI_TWO_VAR = "caristi-two-var"
BANACH_CONDITION = "banach"
ETA = "eta"
MT = "mizoguchi-takahashi"
RHOADES_CONDITION = "rhoades"
WEAK = "weak"
BOYD_WONG = "boyd-wong"
MEIR_KEELER = "meir-keeler"
L_FUNCTION = "l-function"
RHO_BELLMAN = "rho-bellman"

CONDITIONS = (
    CARISTI,
    CARISTI_TWO_VAR,
    BANACH_CONDITION,
    ETA,
    MT,
    RHOADES_CONDITION,
    WEAK,
    BOYD_WONG,
    MEIR_KEELER,
    L_FUNCTION,
    RHO_BELLMAN,
)

_GENERIC_GAUGES = (ETA_CONTRACTION, BANACH, RHO_SECTION3, TABULATED)

# condition -> (accepted gauge kinds, class the gauge is certified as)
GAUGE_RULES = {
    BANACH_CONDITION: ((BANACH,), BANACH),
    ETA: (_GENERIC_GAUGES, ETA_CONTRACTION),
    RHO_BELLMAN: ((RHO_SECTION3,), RHO_SECTION3),
    MT: ((MIZOGUCHI_TAKAHASHI,), MIZOGUCHI_TAKAHASHI),
    RHOADES_CONDITION: ((RHOADES,), RHOADES),
    WEAK: ((WEAK_THETA,), WEAK_THETA),
    BOYD_WONG: (_GENERIC_GAUGES, None),
    L_FUNCTION: (_GENERIC_GAUGES, None),
    MEIR_KEELER: ((BANACH,), None),
}

MEIR_KEELER_NOTE = (
    "the Meir-Keeler condition is stated with 'there exists N > 0' but displayed with delta; "
    "the delta form is certified"
)
RHOADES_NOTE = "t - eta(t) >= 0 is required on the grid; inputs violating it are flagged, not repaired"

# extra halvings of the smallest gap tried by the L-function window search
WINDOW_HALVINGS = 40


@dataclass(frozen=True)
class Witness:
    points: tuple[int, ...] = ()
    lhs: float | None = None
    rhs: float | None = None
    t: float | None = None
    epsilon: float | None = None
    failed_property: str | None = None
    data: dict[str, Any] = field(default_factory=dict)

    @property
    def margin(self) -> float | None:
        if self.lhs is None or self.rhs is None:
            return None
        return self.lhs - self.rhs

    def to_dict(self):
        out = {k: v for k, v in {
            "points": list(self.points),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "t": self.t,
            "epsilon": self.epsilon,
            "property": self.failed_property,
        }.items() if v is not None}
        if self.data:
            out["data"] = self.data
        return out


@dataclass
class Certificate:
    condition: str
    passed: bool
    witness: Witness | None = None
    map_name: str | None = None
    gauge: dict[str, Any] | None = None
    potential: str | None = None
    pairs_checked: int = 0
    grid: tuple[float, ...] = ()
    gauge_report: GaugeReport | None = None
    # epsilon -> recorded delta (meir-keeler) or s -> window (l-function)
    deltas: dict[float, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self):
        out = {
            "condition": self.condition,
            "verdict": self.verdict,
            "map": self.map_name,
            "gauge": self.gauge,
            "potential": self.potential,
            "pairs_checked": self.pairs_checked,
            "grid_size": len(self.grid),
            "notes": self.notes,
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.gauge_report is not None:
            out["gauge_report"] = self.gauge_report.to_dict()
        if self.deltas:
            out["deltas"] = [[eps, delta] for eps, delta in sorted(self.deltas.items())]
        return out


def _first_violation(ok: np.ndarray) -> tuple[int, ...] | None:
    bad = np.argwhere(~ok)
    if len(bad) == 0:
        return None
    return tuple(int(i) for i in bad[0])


def _bound(condition: str, gauge: Gauge | None, d: np.ndarray) -> np.ndarray:
    """Right-hand side of D(Tx, Ty) <= bound(d(x, y)) for the gauge conditions."""
    if condition == BANACH_CONDITION:
        return gauge.params["alpha"] * d
    if condition in (ETA, RHO_BELLMAN, BOYD_WONG, L_FUNCTION):
        return gauge.eval(d)
    if condition == MT:
        return gauge.eval(d) * d
    if condition in (RHOADES_CONDITION, WEAK):
        return d - gauge.eval(d)
    raise InputError(f"condition {condition!r} has no gauge bound")


def _strict(condition: str) -> bool:
    return condition == L_FUNCTION


def contraction_ratio(space: FiniteMetricSpace, T) -> float:
    """max over x != y of D(Tx, Ty) / d(x, y); 0 on a one-point space."""
    if space.n < 2:
        return 0.0
    D = image_distance_matrix(space, T)
    off = ~np.eye(space.n, dtype=bool)
    return float(np.max(D[off] / space.dist[off]))


def _gauge_witness(check: PropertyCheck) -> Witness:
    return Witness(t=check.t, failed_property=check.name, data=dict(check.values))


def _candidate_deltas(distances: np.ndarray) -> np.ndarray:
    """Halved positive gaps between consecutive distinct distances, largest first."""
    gaps = np.diff(distances) / 2.0
    gaps = gaps[gaps > 0.0]
    if gaps.size == 0:
        gaps = np.array([distances[-1] / 2.0])
    return np.unique(gaps)[::-1]


def _certify_meir_keeler(space, D, off, gauge, cert: Certificate) -> Certificate:
    distances = space.distinct_distances()
    candidates = _candidate_deltas(distances) if distances.size else np.array([])
    alpha = gauge.params["alpha"] if gauge is not None else None
    d = space.dist
    for eps in distances:
        eps = float(eps)
        trial = candidates
        if alpha is not None and alpha > 0.0:
            # alpha*(eps + delta) < eps is the window a banach map is guaranteed.
            cap = eps * (1.0 - alpha) / alpha
            trial = np.concatenate([candidates[candidates < cap], [cap / 2.0]])
            trial = np.unique(trial)[::-1]
        found = None
        last_bad = None
        for delta in trial:
            window = off & (d >= eps) & (d < eps + delta)
            ok = ~window | (D < eps)
            bad = _first_violation(ok)
            if bad is None:
                found = float(delta)
                break
            last_bad = (float(delta), bad)
        if found is None:
            delta, (x, y) = last_bad
            cert.passed = False
            cert.witness = Witness(
                points=(x, y), lhs=float(D[x, y]), rhs=eps, epsilon=eps, data={"delta": delta, "d": float(d[x, y])}
            )
            return cert
        cert.deltas[eps] = found
    cert.passed = True
    return cert


def _certify_l_function(space, D, off, gauge: Gauge, grid: np.ndarray, cert: Certificate) -> Certificate:
    distances = space.distinct_distances()
    at_zero = gauge.eval(0.0)
    if at_zero != 0.0:
        cert.passed = False
        cert.witness = Witness(t=0.0, failed_property="phi(0)=0", data={"value": at_zero})
        return cert
    points = np.unique(np.concatenate([grid, distances]))
    values = gauge.eval(points)
    nonpositive = np.flatnonzero(values <= 0.0)
    if nonpositive.size:
        i = int(nonpositive[0])
        cert.passed = False
        cert.witness = Witness(t=float(points[i]), failed_property="phi(s)>0", data={"value": float(values[i])})
        return cert
    candidates = _candidate_deltas(distances) if distances.size else np.array([])
    if candidates.size:
        # narrower windows for gauges that touch s just above it
        candidates = np.concatenate([candidates, candidates[-1] * 2.0 ** -np.arange(1, WINDOW_HALVINGS + 1)])
    for s in distances:
        s = float(s)
        found = None
        for delta in candidates:
            ts = np.linspace(s, s + delta, 5)
            if np.all(gauge.eval(ts) <= s):
                found = float(delta)
                break
        if found is None:
            cert.passed = False
            cert.witness = Witness(t=s, failed_property="window phi<=s above s", data={"value": gauge.eval(s)})
            return cert
        cert.deltas[s] = found
    return _scan_bound(space, D, off, gauge, cert)


def _certify_boyd_wong(space, D, off, gauge: Gauge, grid: np.ndarray, cert: Certificate) -> Certificate:
    at_zero = gauge.eval(0.0)
    if at_zero != 0.0:
        cert.passed = False
        cert.witness = Witness(t=0.0, failed_property="phi(0)=0", data={"value": at_zero})
        return cert
    values = gauge.eval(grid)
    above = np.flatnonzero(~(values < grid))
    if above.size:
        i = int(above[0])
        cert.passed = False
        cert.witness = Witness(t=float(grid[i]), failed_property="phi(s)<s", data={"value": float(values[i])})
        return cert
    right = np.empty_like(grid)
    right[:-1] = np.diff(grid)
    right[-1] = grid[-1]
    # Upper semicontinuity from the right: phi(s+h) - phi(s) must shrink with h.
    jump = jump_excess(lambda t: -gauge.eval(t), grid, right, +1.0)
    bad = np.flatnonzero(jump > LSC_TOL)
    if bad.size:
        i = int(bad[0])
        cert.passed = False
        cert.witness = Witness(t=float(grid[i]), failed_property="right upper semicontinuous", data={"jump": float(jump[i])})
        return cert
    return _scan_bound(space, D, off, gauge, cert)


def _scan_bound(space, D, off, gauge, cert: Certificate) -> Certificate:
    d = space.dist
    bound = _bound(cert.condition, gauge, d)
    ok = (D < bound) if _strict(cert.condition) else (D <= bound)
    bad = _first_violation(ok | ~off)
    cert.pairs_checked = int(off.sum())
    if bad is not None:
        x, y = bad
        cert.passed = False
        cert.witness = Witness(
            points=(x, y), lhs=float(D[x, y]), rhs=float(bound[x, y]), data={"d": float(d[x, y])}
        )
        return cert
    cert.passed = True
    return cert


def _certify_caristi(space, T: SingleValuedMap, potential: PointPotential, cert: Certificate) -> Certificate:
    image = np.asarray(T.image)
    phi = potential.values
    if phi.size != space.n:
        raise InputError(f"potential has {phi.size} values for a space of {space.n} points")
    lhs = space.dist[np.arange(space.n), image]
    rhs = phi - phi[image]
    tol = 0.0 if potential.exact else AXIOM_TOL
    bad = _first_violation(lhs <= rhs + tol)
    cert.pairs_checked = space.n
    if bad is not None:
        (x,) = bad
        cert.passed = False
        cert.witness = Witness(points=(x,), lhs=float(lhs[x]), rhs=float(rhs[x]), data={"image": int(image[x])})
        return cert
    cert.passed = True
    return cert


def _certify_caristi_two_var(space, T: SingleValuedMap, potential: PairPotential, cert: Certificate) -> Certificate:
    image = np.asarray(T.image)
    Phi = potential.matrix
    if Phi.shape[0] != space.n:
        raise InputError(f"potential is {Phi.shape[0]}x{Phi.shape[0]} for a space of {space.n} points")
    lhs = space.dist
    rhs = Phi - Phi[np.ix_(image, image)]
    off = ~np.eye(space.n, dtype=bool)
    tol = 0.0 if potential.exact else AXIOM_TOL
    bad = _first_violation((lhs <= rhs + tol) | ~off)
    cert.pairs_checked = int(off.sum())
    if bad is not None:
        x, y = bad
        cert.passed = False
        cert.witness = Witness(points=(x, y), lhs=float(lhs[x, y]), rhs=float(rhs[x, y]))
        return cert
    cert.passed = True
    return cert


def certify_map(
    space: FiniteMetricSpace,
    T: SingleValuedMap | MultiValuedMap,
    condition: str,
    gauge: Gauge | None = None,
    potential: PointPotential | PairPotential | None = None,
    grid=None,
    map_name: str | None = None,
    potential_name: str | None = None,
    gauge_report: GaugeReport | None = None,
) -> Certificate:
    """Check a contraction condition for T exhaustively over all ordered pairs.

    Gauge conditions also certify the gauge's class properties on the grid
    (default: default_grid(space)); a gauge failure fails the certificate
    with the offending abscissa as witness. gauge_report, when given, must be
    condition_gauge_report(condition, gauge, grid) and is used as is.
    """
    if condition not in CONDITIONS:
        raise InputError(f"unknown condition {condition!r}; expected one of {list(CONDITIONS)}")
    T.check_in(space)
    cert = Certificate(condition, False, map_name=map_name, potential=potential_name)

    if condition in (CARISTI, CARISTI_TWO_VAR):
        if not isinstance(T, SingleValuedMap):
            raise InputError(f"{condition} applies to single-valued maps")
        if condition == CARISTI:
            if not isinstance(potential, PointPotential):
                raise InputError("caristi certification needs a point potential table")
            cert = _certify_caristi(space, T, potential, cert)
        else:
            if not isinstance(potential, PairPotential):
                raise InputError("caristi-two-var certification needs a pair potential table")
            cert = _certify_caristi_two_var(space, T, potential, cert)
        _log(cert)
        return cert

    accepted, as_kind = GAUGE_RULES[condition]
    if gauge is None and condition != MEIR_KEELER:
        raise InputError(f"{condition} certification needs a gauge")
    if gauge is not None:
        if gauge.kind not in accepted:
            raise InputError(f"gauge kind {gauge.kind!r} does not match condition {condition!r}; expected {list(accepted)}")
        cert.gauge = gauge.describe()

    grid = default_grid(space) if grid is None else validate_grid(grid)
    cert.grid = tuple(float(t) for t in grid)
    D = image_distance_matrix(space, T)
    off = ~np.eye(space.n, dtype=bool)

    if condition == MEIR_KEELER:
        cert.notes.append(MEIR_KEELER_NOTE)
        cert.pairs_checked = int(off.sum())
        cert = _certify_meir_keeler(space, D, off, gauge, cert)
        _log(cert)
        return cert
    if condition == L_FUNCTION:
        cert = _certify_l_function(space, D, off, gauge, grid, cert)
        _log(cert)
        return cert
    if condition == BOYD_WONG:
        cert = _certify_boyd_wong(space, D, off, gauge, grid, cert)
        _log(cert)
        return cert

    if condition == RHOADES_CONDITION:
        cert.notes.append(RHOADES_NOTE)
    if gauge_report is None:
        gauge_report = check_gauge_properties(gauge, grid, as_kind=as_kind)
    cert.gauge_report = gauge_report
    cert = _scan_bound(space, D, off, gauge, cert)
    if cert.passed and not cert.gauge_report.ok:
        cert.passed = False
        cert.witness = _gauge_witness(cert.gauge_report.failures()[0])
    _log(cert)
    return cert


def condition_gauge_report(condition: str, gauge: Gauge, grid) -> GaugeReport:
    """The class-property report certify_map checks for gauge under condition.

    Depends only on the gauge and the grid, not on the map.
    """
    if condition not in GAUGE_RULES or GAUGE_RULES[condition][1] is None:
        raise InputError(f"{condition} does not use a gauge property report")
    return check_gauge_properties(gauge, validate_grid(grid), as_kind=GAUGE_RULES[condition][1])


def _log(cert: Certificate) -> None:
    if cert.passed:
        logger.debug("%s certificate passed after %d pairs", cert.condition, cert.pairs_checked)
    else:
        logger.debug("%s certificate failed at %s", cert.condition, cert.witness)


def recheck_witness(
    space: FiniteMetricSpace,
    T,
    cert: Certificate,
    gauge: Gauge | None = None,
    potential: PointPotential | PairPotential | None = None,
) -> bool:
    """Re-evaluate the cited inequality at a failing certificate's witness.

    Returns True when the violation reproduces.
    """
    w = cert.witness
    if cert.passed or w is None:
        return False
    if w.failed_property is not None:
        if w.failed_property in ("phi(0)=0", "phi(s)>0", "phi(s)<s", "window phi<=s above s", "right upper semicontinuous"):
            return not certify_map(space, T, cert.condition, gauge, potential, grid=cert.grid or None).passed
        report = check_gauge_properties(gauge, cert.grid, as_kind=GAUGE_RULES[cert.condition][1])
        return any(c.name == w.failed_property and c.t == w.t for c in report.failures())

    if cert.condition == CARISTI:
        (x,) = w.points
        lhs = space.dist[x, T(x)]
        rhs = potential.values[x] - potential.values[T(x)]
        return bool(lhs > rhs + (0.0 if potential.exact else AXIOM_TOL))
    x, y = w.points
    if cert.condition == CARISTI_TWO_VAR:
        Phi = potential.matrix
        rhs = Phi[x, y] - Phi[T(x), T(y)]
        return bool(space.dist[x, y] > rhs + (0.0 if potential.exact else AXIOM_TOL))
    D = image_distance_matrix(space, T)[x, y]
    d = space.dist[x, y]
    if cert.condition == MEIR_KEELER:
        return bool(w.epsilon <= d < w.epsilon + w.data["delta"] and D >= w.epsilon)
    bound = float(_bound(cert.condition, gauge, np.array(d)))
    return bool(D >= bound) if _strict(cert.condition) else bool(D > bound)
