"""Transformations between contraction classes.

Each reduction turns the gauge of one contraction condition into a gauge
for another, so that a certificate for the first can be re-issued for the
second.
"""

import numpy as np

from errors import InputError, PreconditionError, ReductionError

from .config import banach_gauge
from .gauge import (
    BANACH,
    ETA_CONTRACTION,
    MIZOGUCHI_TAKAHASHI,
    RHOADES,
    WEAK_THETA,
    Gauge,
    check_gauge_properties,
    default_grid,
    validate_grid,
)


def _grid(grid) -> np.ndarray:
    return default_grid() if grid is None else validate_grid(grid)


def _require(gauge: Gauge, grid: np.ndarray, as_kind: str, what: str) -> None:
    report = check_gauge_properties(gauge, grid, as_kind=as_kind)
    if not report.ok:
        first = report.failures()[0]
        raise PreconditionError(f"{what}: gauge is not certified {as_kind} ({first.name} fails at t={first.t})")


def midpoint_gauge(eta: Gauge, grid=None, strict: bool = True) -> Gauge:
    """theta(t) = (eta(t) + t) / 2, strictly between eta and the identity."""
    grid = _grid(grid)
    if strict:
        _require(eta, grid, ETA_CONTRACTION, "midpoint_gauge")
    if eta.kind == BANACH:
        return banach_gauge({"alpha": (eta.params["alpha"] + 1.0) / 2.0}, label=eta.label)
    return Gauge(
        ETA_CONTRACTION,
        lambda t: (eta.eval(t) + t) / 2.0,
        {"derived": "midpoint", "from": eta.describe()},
        label=eta.label,
    )


def weak_to_gauge(theta: Gauge, grid=None, strict: bool = False) -> Gauge:
    """eta(t) = t - theta(t): a weak contraction read as an eta-contraction."""
    grid = _grid(grid)
    if strict:
        _require(theta, grid, WEAK_THETA, "weak_to_gauge")
    values = theta.eval(grid)
    bad = np.flatnonzero(values > grid)
    if bad.size:
        t = float(grid[bad[0]])
        raise ReductionError(f"theta({t}) = {values[bad[0]]} exceeds t; t - theta(t) would be negative", t)
    return Gauge(
        ETA_CONTRACTION,
        lambda t: np.where(t > 0.0, t - theta.eval(t), 0.0),
        {"derived": "weak", "from": theta.describe()},
        label=theta.label,
    )


def mt_to_gauge(eta_mt: Gauge, grid=None, strict: bool = False) -> Gauge:
    """theta(t) = eta_mt(t) * t for a Mizoguchi-Takahashi ratio function."""
    grid = _grid(grid)
    if strict:
        _require(eta_mt, grid, MIZOGUCHI_TAKAHASHI, "mt_to_gauge")
    values = eta_mt.eval(grid)
    bad = np.flatnonzero(values >= 1.0)
    if bad.size:
        t = float(grid[bad[0]])
        raise InputError(f"Mizoguchi-Takahashi ratio eta({t}) = {values[bad[0]]} is not below 1")
    return Gauge(
        ETA_CONTRACTION,
        lambda t: eta_mt.eval(t) * t,
        {"derived": "mizoguchi-takahashi", "from": eta_mt.describe()},
        label=eta_mt.label,
    )


def rhoades_to_gauge(eta: Gauge, grid=None, strict: bool = False) -> Gauge:
    """theta(t) = t - eta(t) for a Rhoades-type subtracted gauge.

    The ratio 1 - eta(t)/t of the result is non-increasing whenever
    eta(t)/t is non-decreasing, so the result is not always a certified
    eta-contraction; check it with check_gauge_properties before use.
    """
    grid = _grid(grid)
    if strict:
        _require(eta, grid, RHOADES, "rhoades_to_gauge")
    values = eta.eval(grid)
    bad = np.flatnonzero(grid - values < 0.0)
    if bad.size:
        t = float(grid[bad[0]])
        raise ReductionError(f"eta({t}) = {values[bad[0]]} exceeds t; t - eta(t) would be negative", t)
    return Gauge(
        ETA_CONTRACTION,
        lambda t: np.where(t > 0.0, t - eta.eval(t), 0.0),
        {"derived": "rhoades", "from": eta.describe()},
        label=eta.label,
    )
