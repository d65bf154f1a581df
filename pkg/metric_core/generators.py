"""Seeded random spaces, sets and maps for tests and the selftest sweeps."""

import numpy as np

from .axioms import repair_triangle
from .space import FiniteMetricSpace, MultiValuedMap, PointSet, SingleValuedMap


def random_space(rng: np.random.Generator, n: int, low: float = 0.1, high: float = 1.0) -> FiniteMetricSpace:
    """Symmetric uniform distances repaired into a metric by shortest-path closure."""
    upper = np.triu(rng.uniform(low, high, size=(n, n)), k=1)
    return FiniteMetricSpace.from_matrix(repair_triangle(upper + upper.T))


def random_point_set(rng: np.random.Generator, n: int, max_size: int | None = None) -> PointSet:
    size = int(rng.integers(1, (max_size or n) + 1))
    return PointSet(tuple(rng.choice(n, size=min(size, n), replace=False)))


def random_self_map(rng: np.random.Generator, n: int, max_image: int | None = None) -> SingleValuedMap:
    """A map whose image is a random subset of at most max_image points."""
    image_size = int(rng.integers(1, min(max_image or n, n) + 1))
    targets = rng.choice(n, size=image_size, replace=False)
    return SingleValuedMap(tuple(int(t) for t in rng.choice(targets, size=n)))


def random_multivalued_map(
    rng: np.random.Generator, n: int, pool_size: int = 2, max_set: int = 3
) -> MultiValuedMap:
    """Each point is sent to one of a few random base sets."""
    pool = [random_point_set(rng, n, max_set) for _ in range(pool_size)]
    return MultiValuedMap(tuple(pool[int(rng.integers(0, pool_size))] for _ in range(n)))
