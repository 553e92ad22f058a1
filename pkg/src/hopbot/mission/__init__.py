"""Mission sizing: relay-chain robot counts, hop counts, mapping time and
store-and-forward relay timing."""

from .relay import NodeTimeline, RelayChain, RelayResult, simulate_relay
from .survey import (
    COMM_RANGE,
    HOP_TIME_SCAN,
    HOP_TIME_TRANSIT,
    REFERENCE_LENGTHS,
    REFERENCE_RANGES,
    REFERENCE_RESOLUTIONS,
    REFERENCE_ROBOTS,
    REFERENCE_TIMES,
    CaveSpec,
    HopCounts,
    MappingTimeModel,
    SurveyPlan,
    hops_required,
    mapping_time,
    plan_survey,
    reference_table_rows,
    robots_required,
)

__all__ = [
    "COMM_RANGE",
    "HOP_TIME_SCAN",
    "HOP_TIME_TRANSIT",
    "REFERENCE_LENGTHS",
    "REFERENCE_RANGES",
    "REFERENCE_RESOLUTIONS",
    "REFERENCE_ROBOTS",
    "REFERENCE_TIMES",
    "CaveSpec",
    "HopCounts",
    "MappingTimeModel",
    "NodeTimeline",
    "RelayChain",
    "RelayResult",
    "SurveyPlan",
    "hops_required",
    "mapping_time",
    "plan_survey",
    "reference_table_rows",
    "robots_required",
    "simulate_relay",
]
