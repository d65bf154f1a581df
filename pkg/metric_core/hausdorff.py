import numpy as np

from errors import InputError

from .space import FiniteMetricSpace, PointSet, SingleValuedMap


def _members(space: FiniteMetricSpace, A) -> list[int]:
    if A is None or len(A) == 0:
        raise InputError("point set must be nonempty")
    if not isinstance(A, PointSet):
        A = PointSet(tuple(A))
    return list(A.check_in(space).members)


def point_to_set_distance(space: FiniteMetricSpace, x: int, A) -> float:
    """d(x, A) = min over a in A of d(x, a)."""
    x = space.check_index(x)
    return float(np.min(space.dist[x, _members(space, A)]))


def directed_hausdorff(space: FiniteMetricSpace, A, B) -> float:
    """sup over x in A of d(x, B)."""
    block = space.dist[np.ix_(_members(space, A), _members(space, B))]
    return float(np.max(np.min(block, axis=1)))


def hausdorff_components(space: FiniteMetricSpace, A, B) -> tuple[float, float]:
    """Both directed components: (sup_{x in A} d(x, B), sup_{x in B} d(x, A))."""
    block = space.dist[np.ix_(_members(space, A), _members(space, B))]
    return float(np.max(np.min(block, axis=1))), float(np.max(np.min(block, axis=0)))


def hausdorff_distance(space: FiniteMetricSpace, A, B) -> float:
    """H(A, B) = max of the two directed sup-min distances."""
    a_to_b, b_to_a = hausdorff_components(space, A, B)
    return max(a_to_b, b_to_a)


def image_distance_matrix(space: FiniteMetricSpace, T) -> np.ndarray:
    """D[x, y] = d(Tx, Ty) for single-valued T, H(Tx, Ty) for multi-valued T."""
    if isinstance(T, SingleValuedMap):
        T.check_in(space)
        image = np.asarray(T.image)
        return space.dist[np.ix_(image, image)]
    T.check_in(space)
    n = space.n
    D = np.zeros((n, n))
    for x in range(n):
        for y in range(x + 1, n):
            D[x, y] = D[y, x] = hausdorff_distance(space, T(x), T(y))
    return D
