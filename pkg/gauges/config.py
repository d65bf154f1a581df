import math
from typing import Any, Callable, Sequence

import numpy as np

from errors import InputError

from .gauge import (
    BANACH,
    ETA_CONTRACTION,
    MIZOGUCHI_TAKAHASHI,
    RHO_SECTION3,
    RHOADES,
    TABULATED,
    WEAK_THETA,
    Gauge,
    GaugeFunction,
)


def _check_table(table) -> tuple[tuple[float, float], ...]:
    try:
        pairs = tuple((float(t), float(v)) for t, v in table)
    except (TypeError, ValueError) as e:
        raise InputError(f"gauge table must be a list of (t, value) pairs: {e}") from e
    if not pairs:
        raise InputError("gauge table is empty")
    for t, v in pairs:
        if not (math.isfinite(t) and math.isfinite(v)) or t < 0.0 or v < 0.0:
            raise InputError(f"gauge table entry ({t}, {v}) must be finite and nonnegative")
    ts = [t for t, _ in pairs]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise InputError("gauge table abscissae must be strictly increasing")
    return pairs


def piecewise_linear(table: Sequence[tuple[float, float]]) -> Callable[[np.ndarray], np.ndarray]:
    """Interpolate the table; clamp below the first abscissa, extend the last slope above the last."""
    ts = np.array([t for t, _ in table])
    vs = np.array([v for _, v in table])
    slope = (vs[-1] - vs[-2]) / (ts[-1] - ts[-2]) if len(ts) > 1 else 0.0

    def fn(t):
        t = np.asarray(t, dtype=np.float64)
        inside = np.interp(t, ts, vs)
        beyond = np.maximum(vs[-1] + slope * (t - ts[-1]), 0.0)
        return np.where(t > ts[-1], beyond, inside)

    return fn


def _alpha(params: dict, upper: float = 1.0) -> float:
    if "alpha" not in params:
        raise InputError("gauge params need 'alpha'")
    alpha = float(params["alpha"])
    if not (0.0 <= alpha < upper):
        raise InputError(f"alpha must lie in [0, {upper:g}), got {alpha}")
    return alpha


def banach_gauge(params, table=None, fn=None, label="") -> Gauge:
    alpha = _alpha(params or {})
    return Gauge(BANACH, lambda t: alpha * t, {"alpha": alpha}, label=label)


def rho_section3_gauge(params=None, table=None, fn=None, label="") -> Gauge:
    # 1/2 t^2 on [0, 1), 1/2 t on [1, inf)
    return Gauge(RHO_SECTION3, lambda t: np.where(t < 1.0, 0.5 * t * t, 0.5 * t), {}, label=label)


def tabulated_gauge(params=None, table=None, fn=None, label="") -> Gauge:
    if table is None:
        raise InputError("tabulated gauge needs a table")
    pairs = _check_table(table)
    return Gauge(TABULATED, piecewise_linear(pairs), {}, table=pairs, label=label)


def _family(kind: str, linear: Callable[[float], GaugeFunction]):
    """Builder for kinds given by 'alpha', a table, or a vectorized callable."""

    def build(params=None, table=None, fn=None, label="") -> Gauge:
        params = dict(params or {})
        if fn is not None:
            return Gauge(kind, fn, params, label=label)
        if table is not None:
            pairs = _check_table(table)
            return Gauge(kind, piecewise_linear(pairs), params, table=pairs, label=label)
        if "alpha" in params:
            alpha = float(params["alpha"])
            if not math.isfinite(alpha) or alpha < 0.0:
                raise InputError(f"alpha must be finite and nonnegative, got {alpha}")
            return Gauge(kind, linear(alpha), {"alpha": alpha}, label=label)
        raise InputError(f"{kind} gauge needs params.alpha, a table, or a callable")

    return build


def _scaled(alpha: float) -> GaugeFunction:
    return lambda t: alpha * t


def _constant(alpha: float) -> GaugeFunction:
    return lambda t: np.full_like(np.asarray(t, dtype=np.float64), alpha)


gauges_config = {
    BANACH: banach_gauge,
    ETA_CONTRACTION: _family(ETA_CONTRACTION, _scaled),
    WEAK_THETA: _family(WEAK_THETA, _scaled),
    MIZOGUCHI_TAKAHASHI: _family(MIZOGUCHI_TAKAHASHI, _constant),
    RHO_SECTION3: rho_section3_gauge,
    RHOADES: _family(RHOADES, _scaled),
    TABULATED: tabulated_gauge,
}


def make_gauge(
    kind: str,
    params: dict[str, Any] | None = None,
    table=None,
    fn: GaugeFunction | None = None,
    label: str = "",
) -> Gauge:
    """Build a gauge through the registry.

    banach takes params {"alpha": a} with 0 <= a < 1; rho-section3 takes
    nothing; tabulated takes a (t, value) table. The other kinds take
    {"alpha": a} (a*t, or the constant a for mizoguchi-takahashi), a table,
    or a vectorized callable.
    """
    try:
        builder = gauges_config[kind]
    except KeyError:
        raise InputError(f"unknown gauge kind {kind!r}; expected one of {sorted(gauges_config)}") from None
    return builder(params or {}, table=table, fn=fn, label=label)
