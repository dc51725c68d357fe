"""
Perception Planner: sensor-to-device placement for multi-camera robots

This package assigns cameras to heterogeneous processing devices in a
best-fit manner, simulates run-time load balancing between the devices, and
evaluates the resulting perception pipeline (detection AP/mAP sweeps, depth
estimation and throughput confidence intervals).
"""

__version__ = "0.1.0"

from .demo import DemoRunner
from .placement import Topology, best_assignment, load_topology, select
from .simulation import SimConfig, run_sim

__all__ = [
    "Topology",
    "load_topology",
    "select",
    "best_assignment",
    "SimConfig",
    "run_sim",
    "DemoRunner",
    "__version__",
]
