"""Caristi potentials: the one- and two-variable functions whose descent certifies fixed points."""

import math
from dataclasses import dataclass

import numpy as np

from errors import InputError, PotentialUndefinedError

from .gauge import Gauge


def caristi_potential(theta: Gauge, d: float) -> float:
    """Phi(d) = d / (1 - theta(d)/d) = d^2 / (d - theta(d)), and 0 at d = 0."""
    d = float(d)
    if not math.isfinite(d) or d < 0.0:
        raise InputError(f"distance must be finite and nonnegative, got {d}")
    if d == 0.0:
        return 0.0
    theta_d = theta.eval(d)
    if not theta_d < d:
        raise PotentialUndefinedError(d, theta_d)
    return d * d / (d - theta_d)


def caristi_potential_array(theta: Gauge, d: np.ndarray) -> np.ndarray:
    """Elementwise caristi_potential over an array of distances."""
    d = np.asarray(d, dtype=np.float64)
    positive = d > 0.0
    theta_d = np.where(positive, theta.eval(np.where(positive, d, 1.0)), 0.0)
    bad = positive & ~(theta_d < d)
    if np.any(bad):
        idx = tuple(np.argwhere(bad)[0])
        raise PotentialUndefinedError(float(d[idx]), float(theta_d[idx]))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(positive, d * d / np.where(positive, d - theta_d, 1.0), 0.0)


@dataclass(frozen=True, eq=False)
class PointPotential:
    """phi: X -> [0, inf) as a table over point indices.

    exact marks tables read from input files, which are compared without
    tolerance; computed tables get the composite-arithmetic slack.
    """

    values: np.ndarray
    exact: bool = True
    label: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise InputError("point potential must be a nonempty vector")
        if not np.all(np.isfinite(values)) or np.any(values < 0.0):
            raise InputError("point potential values must be finite and nonnegative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __getitem__(self, x: int) -> float:
        return float(self.values[x])

    def to_dict(self):
        return {"kind": "point", "values": self.values.tolist(), "exact": self.exact, "label": self.label}


@dataclass(frozen=True, eq=False)
class PairPotential:
    """Phi: X x X -> [0, inf) as a matrix."""

    matrix: np.ndarray
    exact: bool = True
    label: str = ""

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.size == 0:
            raise InputError("pair potential must be a nonempty square matrix")
        if not np.all(np.isfinite(matrix)) or np.any(matrix < 0.0):
            raise InputError("pair potential values must be finite and nonnegative")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def __getitem__(self, xy: tuple[int, int]) -> float:
        return float(self.matrix[xy])

    def to_dict(self):
        return {"kind": "pair", "matrix": self.matrix.tolist(), "exact": self.exact, "label": self.label}


def pair_potential_from_gauge(space, theta: Gauge) -> PairPotential:
    """Phi(x, y) = caristi_potential(theta, d(x, y)) on every pair."""
    return PairPotential(caristi_potential_array(theta, space.dist), exact=False, label=theta.label)


def point_potential_from_pair(pair: PairPotential, T) -> PointPotential:
    """psi(x) = Phi(x, Tx), turning a two-variable potential into a one-variable one."""
    image = np.asarray(T.image)
    n = pair.matrix.shape[0]
    if image.size != n:
        raise InputError(f"map has {image.size} images for a potential over {n} points")
    return PointPotential(pair.matrix[np.arange(n), image], exact=pair.exact, label=pair.label)
