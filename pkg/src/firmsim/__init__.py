"""firmsim: a deterministic agent-based simulator of a firm.

Heterogeneous value-driven employees allocate their workday, meet through a
similarity-based social network that carries behavioral norms, react to
monitoring and pay-for-performance, and an adaptive management strategy
responds to what it observes.
"""

from .core import (DayRecord, Employee, ManagementState, SCENARIOS, SimConfig,
                   TimeAllocation, ValueType, scenario_config, seed_replicate,
                   validate_config)
from .engine import AggregateResult, RunResult, run_replicates, run_scenario, step_day

__version__ = "0.1.0"

__all__ = [
    "AggregateResult", "DayRecord", "Employee", "ManagementState", "RunResult",
    "SCENARIOS", "SimConfig", "TimeAllocation", "ValueType", "run_replicates",
    "run_scenario", "scenario_config", "seed_replicate", "step_day",
    "validate_config", "__version__",
]
