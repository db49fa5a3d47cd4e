"""Stochastic multi-trip routing and fleet sizing for hospital delivery robots."""

from .baselines import exhaustive_solve, plain_ts_run, random_initial_plan, vns_run
from .construct import greedy_insert
from .instances import (
    Gaussian,
    InfeasibleInstanceError,
    Instance,
    InstanceFormatError,
    Request,
    SolomonFormatError,
    SpeedProfile,
    SpeedZone,
    extend_instance,
    load_instance,
    parse_solomon,
    save_instance,
    zero_variance_copy,
)
from .normals import add, exceed_probability, max_with_constant, std_cdf, std_pdf
from .plans import (
    CostBreakdown,
    Plan,
    Schedule,
    evaluate,
    load_plan,
    plan_table,
    propagate,
    save_plan,
    service_probability,
)
from .simulate import SimulationReport, simulate_plan
from .tabu import SearchParams, SearchResult, its_run

__all__ = [
    "CostBreakdown",
    "Gaussian",
    "InfeasibleInstanceError",
    "Instance",
    "InstanceFormatError",
    "Plan",
    "Request",
    "Schedule",
    "SearchParams",
    "SearchResult",
    "SimulationReport",
    "SolomonFormatError",
    "SpeedProfile",
    "SpeedZone",
    "add",
    "evaluate",
    "exceed_probability",
    "exhaustive_solve",
    "extend_instance",
    "greedy_insert",
    "its_run",
    "load_instance",
    "load_plan",
    "max_with_constant",
    "parse_solomon",
    "plain_ts_run",
    "plan_table",
    "propagate",
    "random_initial_plan",
    "save_instance",
    "save_plan",
    "service_probability",
    "simulate_plan",
    "std_cdf",
    "std_pdf",
    "vns_run",
    "zero_variance_copy",
]

__version__ = "0.1.0"
