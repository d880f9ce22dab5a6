"""Deterministic simulator and analytic toolkit for C-V2X sidelink Mode 4
semi-persistent scheduling, with and without reselection lookaheads."""

from .analytic import AnalyticParams, p_col_sps, p_col_spsla, sci_extra_bits
from .config import (
    CapacityError,
    ConfigurationError,
    SCHEDULER_SPS,
    SCHEDULER_SPSLA,
    ScenarioConfig,
    rc_range,
    ues_for_cbr,
)
from .experiment import (
    CollisionEvent,
    RunMetrics,
    SweepPoint,
    SweepResult,
    aggregate_runs,
    churn_step,
    derive_seed,
    run_scenario,
    same_subframe_violations,
    sweep,
)
from .grid import ResourceCoord, TransmissionLog, channel_busy_ratio, collision_probability
from .lookahead import (
    ClaimBoard,
    Lookahead,
    LookaheadRegistry,
    check_lookahead,
    la_step,
    plan_lookahead,
    receive_lookaheads,
    select_resource_lookahead,
)
from .sensing import CandidateSet, OccupancyWindow, SensingMap, candidate_resources
from .sps import UeState, draw_rc, select_resource, sps_step

__version__ = "0.1.0"

__all__ = [
    "AnalyticParams",
    "CandidateSet",
    "CapacityError",
    "ClaimBoard",
    "CollisionEvent",
    "ConfigurationError",
    "Lookahead",
    "LookaheadRegistry",
    "OccupancyWindow",
    "ResourceCoord",
    "RunMetrics",
    "SCHEDULER_SPS",
    "SCHEDULER_SPSLA",
    "ScenarioConfig",
    "SensingMap",
    "SweepPoint",
    "SweepResult",
    "TransmissionLog",
    "UeState",
    "aggregate_runs",
    "candidate_resources",
    "channel_busy_ratio",
    "check_lookahead",
    "churn_step",
    "collision_probability",
    "derive_seed",
    "draw_rc",
    "la_step",
    "p_col_sps",
    "p_col_spsla",
    "plan_lookahead",
    "rc_range",
    "receive_lookaheads",
    "run_scenario",
    "same_subframe_violations",
    "sci_extra_bits",
    "select_resource",
    "select_resource_lookahead",
    "sps_step",
    "sweep",
    "ues_for_cbr",
]
