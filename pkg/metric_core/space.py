"""Finite metric spaces, point sets and (multi-valued) self-maps."""

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from errors import InputError
from utils import check_finite_matrix

from .axioms import check_metric_axioms


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """An explicit point set with a validated distance matrix.

    Finite spaces are complete, and every nonempty subset is closed and
    bounded, so CB(X) is simply the family of nonempty subsets.
    """

    labels: tuple[str, ...]
    dist: np.ndarray

    def __post_init__(self):
        dist = check_finite_matrix(self.dist, "dist")
        labels = tuple(str(label) for label in self.labels)
        if len(labels) != dist.shape[0]:
            raise InputError(f"{len(labels)} labels for a {dist.shape[0]}x{dist.shape[0]} matrix")
        if len(set(labels)) != len(labels):
            raise InputError("point labels must be unique")
        report = check_metric_axioms(dist)
        if not report.ok:
            first = report.violations[0]
            raise InputError(f"distance matrix is not a metric: {first.axiom} at {first.witness}")
        dist.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_matrix(cls, dist, labels: Sequence[str] | None = None) -> "FiniteMetricSpace":
        arr = check_finite_matrix(dist, "dist")
        if labels is None:
            labels = [str(i) for i in range(arr.shape[0])]
        return cls(tuple(labels), arr)

    @classmethod
    def on_line(cls, coords: Sequence[float], labels: Sequence[str] | None = None) -> "FiniteMetricSpace":
        """Points on the real line with d(x, y) = |x - y|."""
        pts = np.asarray(coords, dtype=np.float64)
        if labels is None:
            labels = [f"{c:g}" for c in pts]
        return cls.from_matrix(np.abs(pts[:, None] - pts[None, :]), labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise InputError(f"unknown point label {label!r}") from None

    def check_index(self, i: int) -> int:
        if not isinstance(i, (int, np.integer)) or not 0 <= int(i) < self.n:
            raise InputError(f"point index {i!r} out of range for a space of {self.n} points")
        return int(i)

    def point_set(self, members: Iterable[int]) -> "PointSet":
        return PointSet(tuple(self.check_index(i) for i in members))

    def point_set_from_labels(self, labels: Iterable[str]) -> "PointSet":
        return PointSet(tuple(self.index(label) for label in labels))

    def distinct_distances(self) -> np.ndarray:
        """Sorted distinct positive pairwise distances."""
        iu = np.triu_indices(self.n, k=1)
        return np.unique(self.dist[iu])

    def to_dict(self):
        return {"labels": list(self.labels), "dist": self.dist.tolist()}


@dataclass(frozen=True)
class PointSet:
    """A nonempty set of point indices, kept as a sorted tuple."""

    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(set(int(i) for i in self.members)))
        if not members:
            raise InputError("point set must be nonempty")
        if members[0] < 0:
            raise InputError(f"negative point index {members[0]}")
        object.__setattr__(self, "members", members)

    def __contains__(self, i) -> bool:
        return int(i) in self.members

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def check_in(self, space: FiniteMetricSpace) -> "PointSet":
        if self.members[-1] >= space.n:
            raise InputError(f"point index {self.members[-1]} out of range for a space of {space.n} points")
        return self

    def to_list(self) -> list[int]:
        return list(self.members)


@dataclass(frozen=True)
class SingleValuedMap:
    """T: X -> X as an image table, image[i] = T(i)."""

    image: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(int(i) for i in self.image))

    def __call__(self, i: int) -> int:
        return self.image[i]

    def __len__(self) -> int:
        return len(self.image)

    def check_in(self, space: FiniteMetricSpace) -> "SingleValuedMap":
        if len(self.image) != space.n:
            raise InputError(f"map has {len(self.image)} images for a space of {space.n} points")
        for x, y in enumerate(self.image):
            if not 0 <= y < space.n:
                raise InputError(f"image of point {x} is {y}, outside the space")
        return self

    def as_multivalued(self) -> "MultiValuedMap":
        return MultiValuedMap(tuple(PointSet((y,)) for y in self.image))

    def to_dict(self):
        return {"kind": "single", "image": list(self.image)}


@dataclass(frozen=True)
class MultiValuedMap:
    """T: X -> CB(X); images[i] is the nonempty set T(i)."""

    images: tuple[PointSet, ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "images",
            tuple(s if isinstance(s, PointSet) else PointSet(tuple(s)) for s in self.images),
        )

    def __call__(self, i: int) -> PointSet:
        return self.images[i]

    def __len__(self) -> int:
        return len(self.images)

    def check_in(self, space: FiniteMetricSpace) -> "MultiValuedMap":
        if len(self.images) != space.n:
            raise InputError(f"map has {len(self.images)} images for a space of {space.n} points")
        for s in self.images:
            s.check_in(space)
        return self

    def to_dict(self):
        return {"kind": "multi", "images": [s.to_list() for s in self.images]}


SelfMap = SingleValuedMap | MultiValuedMap
