from .gauge import (
    GAUGE_KINDS,
    Gauge,
    GaugeReport,
    PropertyCheck,
    check_gauge_properties,
    default_grid,
)
from .config import gauges_config, make_gauge
from .reductions import midpoint_gauge, mt_to_gauge, rhoades_to_gauge, weak_to_gauge
from .potential import (
    PairPotential,
    PointPotential,
    caristi_potential,
    caristi_potential_array,
    pair_potential_from_gauge,
    point_potential_from_pair,
)
from .certify import (
    CONDITIONS,
    Certificate,
    Witness,
    certify_map,
    condition_gauge_report,
    contraction_ratio,
    recheck_witness,
)

__all__ = [
    "GAUGE_KINDS",
    "Gauge",
    "GaugeReport",
    "PropertyCheck",
    "check_gauge_properties",
    "default_grid",
    "gauges_config",
    "make_gauge",
    "midpoint_gauge",
    "mt_to_gauge",
    "rhoades_to_gauge",
    "weak_to_gauge",
    "PairPotential",
    "PointPotential",
    "caristi_potential",
    "caristi_potential_array",
    "pair_potential_from_gauge",
    "point_potential_from_pair",
    "CONDITIONS",
    "Certificate",
    "Witness",
    "certify_map",
    "condition_gauge_report",
    "contraction_ratio",
    "recheck_witness",
]
