from typing import Any, Protocol

import numpy as np

from errors import InputError


class Aggregator(Protocol):
    """Defines the 'shape' of the term Im(x, y, t) the Bellman operator expects."""

    form: str

    def apply(self, t: np.ndarray) -> np.ndarray:
        """Return Im(x, y, t[x, y]) for a |W| x |D| array of continuation values."""
        ...

    def lipschitz(self) -> float:
        """A bound L with |Im(x, y, a) - Im(x, y, b)| <= L |a - b|."""
        ...

    def check_shape(self, shape: tuple[int, int]) -> None: ...

    def describe(self) -> dict[str, Any]: ...


def _coefficients(c, name: str = "c") -> np.ndarray:
    try:
        arr = np.array(c, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise InputError(f"aggregator {name} must be numeric: {e}") from e
    if arr.ndim not in (0, 2):
        raise InputError(f"aggregator {name} must be a scalar or a |W| x |D| matrix")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"aggregator {name} must be finite")
    return arr


def _check_matrix_shape(arr: np.ndarray, shape, name: str) -> None:
    if arr.ndim == 2 and arr.shape != tuple(shape):
        raise InputError(f"aggregator {name} has shape {arr.shape}, expected {tuple(shape)}")


class ConstantAggregator:
    form = "constant"

    def __init__(self, c=0.0):
        self.c = _coefficients(c)

    def apply(self, t: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self.c, np.shape(t)).astype(np.float64)

    def lipschitz(self) -> float:
        return 0.0

    def check_shape(self, shape) -> None:
        _check_matrix_shape(self.c, shape, "c")

    def describe(self):
        return {"form": self.form, "params": {"c": self.c.tolist()}}


class AffineAggregator:
    form = "affine"

    def __init__(self, c=0.0, beta: float = 0.0):
        self.c = _coefficients(c)
        self.beta = float(beta)
        if not abs(self.beta) < 1.0:
            raise InputError(f"affine aggregator needs |beta| < 1, got {self.beta}")

    def apply(self, t: np.ndarray) -> np.ndarray:
        return self.c + self.beta * np.asarray(t, dtype=np.float64)

    def lipschitz(self) -> float:
        return abs(self.beta)

    def check_shape(self, shape) -> None:
        _check_matrix_shape(self.c, shape, "c")

    def describe(self):
        return {"form": self.form, "params": {"c": self.c.tolist(), "beta": self.beta}}


class TabulatedAggregator:
    """Piecewise-linear in t over a shared abscissa grid, one value row per (x, y).

    Outside the grid the end values are held constant, which keeps the
    measured Lipschitz bound valid on the whole line.
    """

    form = "tabulated"

    def __init__(self, ts, values, lipschitz: float | None = None):
        self.ts = np.array(ts, dtype=np.float64)
        self.values = np.array(values, dtype=np.float64)
        if self.ts.ndim != 1 or self.ts.size < 2 or np.any(np.diff(self.ts) <= 0.0):
            raise InputError("tabulated aggregator needs at least two strictly increasing abscissae")
        if self.values.ndim != 3 or self.values.shape[2] != self.ts.size:
            raise InputError("tabulated aggregator values must be |W| x |D| x len(ts)")
        if not (np.all(np.isfinite(self.ts)) and np.all(np.isfinite(self.values))):
            raise InputError("tabulated aggregator must be finite")
        slopes = np.abs(np.diff(self.values, axis=2)) / np.diff(self.ts)
        self.measured = float(np.max(slopes))
        if lipschitz is None:
            lipschitz = self.measured
        self.declared = float(lipschitz)
        if self.declared < self.measured:
            raise InputError(
                f"declared Lipschitz bound {self.declared} is below the measured slope {self.measured}"
            )

    def apply(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        out = np.empty(t.shape)
        for x in range(t.shape[0]):
            for y in range(t.shape[1]):
                out[x, y] = np.interp(t[x, y], self.ts, self.values[x, y])
        return out

    def lipschitz(self) -> float:
        return self.declared

    def steepest_segment(self) -> tuple[int, int, int]:
        """(x, y, k) of the segment [ts[k], ts[k+1]] with the largest slope."""
        slopes = np.abs(np.diff(self.values, axis=2)) / np.diff(self.ts)
        x, y, k = np.unravel_index(int(np.argmax(slopes)), slopes.shape)
        return int(x), int(y), int(k)

    def check_shape(self, shape) -> None:
        if self.values.shape[:2] != tuple(shape):
            raise InputError(f"tabulated aggregator covers {self.values.shape[:2]}, expected {tuple(shape)}")

    def describe(self):
        return {
            "form": self.form,
            "params": {"ts": self.ts.tolist(), "values": self.values.tolist(), "lipschitz": self.declared},
        }
