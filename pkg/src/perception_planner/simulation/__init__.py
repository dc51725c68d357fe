"""
Load-balance simulator: status broadcasts, least-expected-completion
dispatch and per-node run metrics.
"""

from .balance import (
    ArrivalProcess,
    BalanceSimulator,
    EventKind,
    NodeSpec,
    NodeStatus,
    ProfileRef,
    SimConfig,
    SimEvent,
    SourceSpec,
    config_from_selection,
    load_sim_config,
    parse_sim_config,
    run_sim,
    run_sim_traced,
    schedule,
    write_events_csv,
)
from .metrics import MetricsCollector, NodeMetrics, SimMetrics, SimTotals

__all__ = [
    "ArrivalProcess",
    "EventKind",
    "ProfileRef",
    "NodeSpec",
    "SourceSpec",
    "SimConfig",
    "NodeStatus",
    "SimEvent",
    "BalanceSimulator",
    "schedule",
    "run_sim",
    "run_sim_traced",
    "parse_sim_config",
    "load_sim_config",
    "config_from_selection",
    "write_events_csv",
    "MetricsCollector",
    "NodeMetrics",
    "SimTotals",
    "SimMetrics",
]
