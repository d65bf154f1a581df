"""Metric axiom checks and triangle repair for explicit distance matrices."""

from dataclasses import dataclass, field

import numpy as np

from errors import InputError
from utils import AXIOM_TOL, check_finite_matrix

ZERO_DIAGONAL = "zero-diagonal"
SYMMETRY = "symmetry"
POSITIVITY = "positivity"
TRIANGLE = "triangle"


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str
    # (i,) for the diagonal, (i, j) for symmetry/positivity,
    # (i, j, k) for dist[i][j] > dist[i][k] + dist[k][j].
    witness: tuple[int, ...]

    def to_dict(self):
        return {"axiom": self.axiom, "witness": list(self.witness)}


@dataclass(frozen=True)
class AxiomReport:
    violations: list[AxiomViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def axioms_violated(self) -> list[str]:
        return [v.axiom for v in self.violations]

    def to_dict(self):
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


def _first(mask: np.ndarray) -> tuple[int, ...] | None:
    # argwhere walks the mask in row-major order, so this is the first witness
    # of a plain nested-loop scan.
    hits = np.argwhere(mask)
    if len(hits) == 0:
        return None
    return tuple(int(i) for i in hits[0])


def check_metric_axioms(dist, tol: float = AXIOM_TOL) -> AxiomReport:
    """Check the four metric axioms, reporting one witness per violated axiom."""
    d = check_finite_matrix(dist, "dist")
    n = d.shape[0]
    violations = []

    witness = _first(np.abs(np.diag(d)) > tol)
    if witness is not None:
        violations.append(AxiomViolation(ZERO_DIAGONAL, witness))

    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    witness = _first(upper & (np.abs(d - d.T) > tol))
    if witness is not None:
        violations.append(AxiomViolation(SYMMETRY, witness))

    off_diagonal = ~np.eye(n, dtype=bool)
    witness = _first(off_diagonal & (d <= 0.0))
    if witness is not None:
        violations.append(AxiomViolation(POSITIVITY, witness))

    # via[i, j, k] = d[i, k] + d[k, j]
    via = d[:, None, :] + d.T[None, :, :]
    witness = _first(d[:, :, None] > via + tol)
    if witness is not None:
        violations.append(AxiomViolation(TRIANGLE, witness))

    return AxiomReport(violations)


def repair_triangle(dist) -> np.ndarray:
    """Return the all-pairs shortest-path closure of a symmetric positive matrix."""
    d = check_finite_matrix(dist, "dist")
    n = d.shape[0]
    if np.any(np.diag(d) != 0.0):
        raise InputError("repair_triangle needs a zero diagonal")
    if np.any(d != d.T):
        i, j = np.argwhere(d != d.T)[0]
        raise InputError(f"repair_triangle needs a symmetric matrix, dist[{i}][{j}] != dist[{j}][{i}]")
    if np.any(d[~np.eye(n, dtype=bool)] <= 0.0):
        raise InputError("repair_triangle needs positive off-diagonal entries")

    closure = d.copy()
    # sweep until rounding stops shortening entries
    while True:
        previous = closure
        for k in range(n):
            closure = np.minimum(closure, closure[:, k][:, np.newaxis] + closure[k, :][np.newaxis, :])
        if np.array_equal(previous, closure):
            return closure
