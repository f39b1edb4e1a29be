"""
D2KE 距离层

Author: gngdingghuan
"""

from distances.measures import (
    BaseMeasure,
    MetricAxioms,
    DtwMeasure,
    EditMeasure,
    ModHausdorffMeasure,
    dtw,
    edit_distance,
    mod_hausdorff,
    get_measure,
    measure_for_kind,
)
from distances.matrix import cross_distances, pairwise_distances, audit_hook
from distances.oracle import oracle_distance

__all__ = [
    "BaseMeasure",
    "MetricAxioms",
    "DtwMeasure",
    "EditMeasure",
    "ModHausdorffMeasure",
    "dtw",
    "edit_distance",
    "mod_hausdorff",
    "get_measure",
    "measure_for_kind",
    "cross_distances",
    "pairwise_distances",
    "audit_hook",
    "oracle_distance",
]
