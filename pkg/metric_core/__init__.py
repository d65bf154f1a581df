from .space import FiniteMetricSpace, PointSet, SingleValuedMap, MultiValuedMap, SelfMap
from .axioms import AxiomReport, AxiomViolation, check_metric_axioms, repair_triangle
from .hausdorff import (
    directed_hausdorff,
    hausdorff_components,
    hausdorff_distance,
    image_distance_matrix,
    point_to_set_distance,
)
from .generators import random_multivalued_map, random_point_set, random_self_map, random_space

__all__ = [
    "FiniteMetricSpace",
    "PointSet",
    "SingleValuedMap",
    "MultiValuedMap",
    "SelfMap",
    "AxiomReport",
    "AxiomViolation",
    "check_metric_axioms",
    "repair_triangle",
    "directed_hausdorff",
    "hausdorff_components",
    "hausdorff_distance",
    "image_distance_matrix",
    "point_to_set_distance",
    "random_multivalued_map",
    "random_point_set",
    "random_self_map",
    "random_space",
]
