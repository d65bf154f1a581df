from .orbit import (
    FIXED_POINT,
    MAX_ITER,
    STALLED,
    IterationTrace,
    MultiValuedOrbit,
    PicardIteration,
    StopRule,
    audit_telescoping,
    multivalued_orbit,
    multivalued_runner,
    picard_iterate,
    picard_runner,
    telescoping_bound,
)
from .oracle import brute_force_fixed_points
