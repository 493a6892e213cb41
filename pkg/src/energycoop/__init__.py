"""Energy-aware primary/secondary cooperation: analysis, optimization, simulation."""

from .params import (
    DomainError,
    Feedback,
    PrimaryState,
    ResourceAllocation,
    SystemParams,
    ValidationResult,
    validate,
)
from .channel import (
    LinkSpec,
    min_bandwidth_time_product,
    mrc_decode_failure,
    outage,
    outage_probability,
    secondary_rate,
)
from .baseline import BaselineReport, noncoop_optimize, noncoop_service_rate
from .analysis import (
    ChainSolution,
    CoopReport,
    make_report,
    primary_packets_per_joule,
    secondary_throughput,
    solve_chain,
    state_probability,
    success_probabilities,
)
from .optimizer import OptimizerConfig, OptimumReport, optimize, optimize_disconnected

__version__ = "0.1.0"
