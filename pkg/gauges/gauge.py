"""Gauge (comparison) functions and sampled certification of their properties.

A gauge is any map t >= 0 -> value >= 0 used to bound post-map distances,
e.g. d(Tx, Ty) <= eta(d(x, y)). Analytic properties (monotone ratios,
semicontinuity) cannot be decided for black-box functions, so they are
certified on a finite evaluation grid that is recorded with every report.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Protocol

import numpy as np

from errors import InputError
from utils import AXIOM_TOL, GRID_POINTS, LSC_TOL

logger = logging.getLogger(__name__)

BANACH = "banach"
ETA_CONTRACTION = "eta-contraction"
WEAK_THETA = "weak-theta"
MIZOGUCHI_TAKAHASHI = "mizoguchi-takahashi"
RHO_SECTION3 = "rho-section3"
RHOADES = "rhoades"
TABULATED = "tabulated"

GAUGE_KINDS = (BANACH, ETA_CONTRACTION, WEAK_THETA, MIZOGUCHI_TAKAHASHI, RHO_SECTION3, RHOADES, TABULATED)

# Property names as they appear in reports.
NONNEGATIVE = "nonnegative"
LOWER_SEMICONTINUOUS = "lower-semicontinuous"
BELOW_IDENTITY = "eta(t)<t"
RATIO_NONDECREASING = "eta(t)/t non-decreasing"
POSITIVE = "theta(t)>0"
RATIO_NONINCREASING = "theta(t)/t non-increasing"
UNIT_INTERVAL = "0<=eta(t)<1"
NONDECREASING = "eta non-decreasing"
REMAINDER_NONNEGATIVE = "t-eta(t)>=0"


class GaugeFunction(Protocol):
    """Vectorized t -> value; must accept and return numpy arrays."""

    def __call__(self, t: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class Gauge:
    kind: str
    fn: GaugeFunction
    params: dict[str, Any] = field(default_factory=dict)
    table: tuple[tuple[float, float], ...] | None = None
    label: str = ""

    def eval(self, t):
        """Evaluate at a scalar (returns float) or an array (returns array)."""
        arr = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.broadcast_to(np.asarray(self.fn(arr), dtype=np.float64), arr.shape)
        if arr.ndim == 0:
            return float(out)
        return np.array(out)

    def __call__(self, t):
        return self.eval(t)

    def describe(self) -> dict[str, Any]:
        desc = {"kind": self.kind, "params": self.params}
        if self.table is not None:
            desc["table"] = [list(p) for p in self.table]
        if self.label:
            desc["label"] = self.label
        return desc

    def to_dict(self):
        return self.describe()


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    passed: bool
    t: float | None = None
    values: dict[str, float] = field(default_factory=dict)

    def to_dict(self):
        out = {"name": self.name, "passed": self.passed}
        if not self.passed:
            out["t"] = self.t
            out["values"] = self.values
        return out


@dataclass(frozen=True)
class GaugeReport:
    kind: str
    grid: tuple[float, ...]
    checks: tuple[PropertyCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[PropertyCheck]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str) -> PropertyCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {
            "kind": self.kind,
            "ok": self.ok,
            "grid_size": len(self.grid),
            "checks": [c.to_dict() for c in self.checks],
        }


def validate_grid(grid) -> np.ndarray:
    arr = np.asarray(grid, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError("evaluation grid must be a nonempty list of t > 0")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise InputError("evaluation grid values must be finite and > 0")
    if np.any(np.diff(arr) <= 0.0):
        raise InputError("evaluation grid must be strictly increasing")
    return arr


def default_grid(space=None) -> np.ndarray:
    """Distinct pairwise distances plus a log-spaced grid spanning them."""
    if space is None or space.n < 2:
        return np.geomspace(1e-3, 1e3, GRID_POINTS)
    distances = space.distinct_distances()
    spread = np.geomspace(distances[0], distances[-1], GRID_POINTS)
    return np.unique(np.concatenate([distances, spread]))


def _first_failure(name, ok: np.ndarray, grid: np.ndarray, values: dict[str, np.ndarray]) -> PropertyCheck:
    bad = np.flatnonzero(~ok)
    if bad.size == 0:
        return PropertyCheck(name, True)
    i = int(bad[0])
    return PropertyCheck(name, False, float(grid[i]), {k: float(v[i]) for k, v in values.items()})


def _offset_steps(grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Left/right spacing around each grid point; the ends reuse t itself."""
    left = np.empty_like(grid)
    left[0] = grid[0]
    left[1:] = np.diff(grid)
    right = np.empty_like(grid)
    right[-1] = grid[-1]
    right[:-1] = np.diff(grid)
    return left, right


def jump_excess(fn: Callable, grid: np.ndarray, step: np.ndarray, direction: float) -> np.ndarray:
    """Excess fn(t) - fn(t + direction*h) that does not shrink with h.

    Probes at h = step/2**10 and h = step/2**20. A continuous function's
    excess shrinks with h; a jump keeps it. Returns the fine-scale excess
    where it fails to shrink, and 0 elsewhere.
    """
    at_t = fn(grid)
    coarse = at_t - fn(grid + direction * step * 2.0**-10)
    fine = at_t - fn(grid + direction * step * 2.0**-20)
    persistent = (fine > LSC_TOL) & (fine > 0.5 * coarse)
    return np.where(persistent, fine, 0.0)


def lower_semicontinuity_check(gauge: Gauge, grid: np.ndarray) -> PropertyCheck:
    left, right = _offset_steps(grid)
    from_left = jump_excess(gauge.eval, grid, left, -1.0)
    from_right = jump_excess(gauge.eval, grid, right, +1.0)
    excess = np.maximum(from_left, from_right)
    return _first_failure(LOWER_SEMICONTINUOUS, excess == 0.0, grid, {"value": gauge.eval(grid), "jump": excess})


def _ratio_check(name, ratio: np.ndarray, grid: np.ndarray, increasing: bool) -> PropertyCheck:
    if ratio.size < 2:
        return PropertyCheck(name, True)
    step = np.diff(ratio)
    ok = step >= -AXIOM_TOL if increasing else step <= AXIOM_TOL
    # Witness is the right end of the offending consecutive pair.
    full_ok = np.concatenate([[True], ok])
    previous = np.concatenate([[ratio[0]], ratio[:-1]])
    return _first_failure(name, full_ok, grid, {"ratio": ratio, "previous_ratio": previous})


def check_gauge_properties(gauge: Gauge, grid, as_kind: str | None = None) -> GaugeReport:
    """Check the properties of the gauge's declared class on the grid.

    as_kind overrides the declared class, e.g. to check that a banach gauge
    may serve as an eta-contraction.
    """
    grid = validate_grid(grid)
    kind = as_kind or gauge.kind
    if kind not in GAUGE_KINDS:
        raise InputError(f"unknown gauge kind {kind!r}")
    v = gauge.eval(grid)
    ratio = v / grid
    checks = [
        _first_failure(NONNEGATIVE, v >= 0.0, grid, {"value": v}),
        lower_semicontinuity_check(gauge, grid),
    ]
    if kind in (BANACH, ETA_CONTRACTION, RHO_SECTION3):
        checks.append(_first_failure(BELOW_IDENTITY, v < grid, grid, {"value": v}))
        checks.append(_ratio_check(RATIO_NONDECREASING, ratio, grid, increasing=True))
    elif kind == WEAK_THETA:
        checks.append(_first_failure(POSITIVE, v > 0.0, grid, {"value": v}))
        checks.append(_ratio_check(RATIO_NONINCREASING, ratio, grid, increasing=False))
    elif kind == MIZOGUCHI_TAKAHASHI:
        checks.append(_first_failure(UNIT_INTERVAL, (v >= 0.0) & (v < 1.0), grid, {"value": v}))
        previous = np.concatenate([[v[0]], v[:-1]])
        checks.append(_first_failure(NONDECREASING, v >= previous, grid, {"value": v, "previous": previous}))
    elif kind == RHOADES:
        checks.append(_first_failure(POSITIVE, v > 0.0, grid, {"value": v}))
        checks.append(_first_failure(REMAINDER_NONNEGATIVE, grid - v >= 0.0, grid, {"value": v}))
        checks.append(_ratio_check(RATIO_NONDECREASING, ratio, grid, increasing=True))

    report = GaugeReport(kind, tuple(float(t) for t in grid), tuple(checks))
    if not report.ok:
        logger.debug("gauge %s fails %s", gauge.kind, [c.name for c in report.failures()])
    return report
