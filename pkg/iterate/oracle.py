from metric_core import FiniteMetricSpace, SingleValuedMap


def brute_force_fixed_points(space: FiniteMetricSpace, T) -> tuple[int, ...]:
    """Every x with T(x) = x (single-valued) or x in T(x) (multi-valued), by full scan."""
    T.check_in(space)
    if isinstance(T, SingleValuedMap):
        return tuple(x for x in range(space.n) if T(x) == x)
    return tuple(x for x in range(space.n) if x in T(x))
