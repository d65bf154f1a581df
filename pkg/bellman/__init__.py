from .aggregator import Aggregator, AffineAggregator, ConstantAggregator, TabulatedAggregator
from .config import aggregators_config, make_aggregator
from .problem import BellmanProblem, ValueFunction, random_affine_problem
from .solver import (
    BANACH_BETA,
    STRICT_RHO,
    BellmanCertificate,
    SolveTrace,
    bellman_operator,
    certify_bellman,
    recheck_bellman_witness,
    solve_bellman,
    sup_metric,
)

__all__ = [
    "Aggregator",
    "AffineAggregator",
    "ConstantAggregator",
    "TabulatedAggregator",
    "aggregators_config",
    "make_aggregator",
    "BellmanProblem",
    "ValueFunction",
    "random_affine_problem",
    "BANACH_BETA",
    "STRICT_RHO",
    "BellmanCertificate",
    "SolveTrace",
    "bellman_operator",
    "certify_bellman",
    "recheck_bellman_witness",
    "solve_bellman",
    "sup_metric",
]
