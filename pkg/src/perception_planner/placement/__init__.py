"""
Sensor-to-device placement: topology model, best-fit selection and the
exhaustive reference oracle.
"""

from .oracle import (
    Assignment,
    OracleReport,
    Score,
    best_assignment,
    enumerate_assignments,
    score_assignment,
)
from .selection import (
    Configuration,
    SelectionResult,
    UnassignedSensor,
    find_connected,
    select,
    sort_devices,
    sort_sensors,
    verify_configurations,
)
from .topology import (
    Device,
    LinkSet,
    Sensor,
    Topology,
    Violation,
    load_topology,
    parse_topology,
    serialize_topology,
    validate,
)

__all__ = [
    "Sensor",
    "Device",
    "LinkSet",
    "Topology",
    "Violation",
    "parse_topology",
    "serialize_topology",
    "load_topology",
    "validate",
    "Configuration",
    "SelectionResult",
    "UnassignedSensor",
    "sort_sensors",
    "sort_devices",
    "find_connected",
    "select",
    "verify_configurations",
    "Assignment",
    "Score",
    "OracleReport",
    "enumerate_assignments",
    "best_assignment",
    "score_assignment",
]
