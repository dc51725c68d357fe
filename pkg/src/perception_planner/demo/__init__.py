"""
Demo scenarios and the end-to-end demo runner.
"""

from .runner import DemoRunner, run_quick_demo
from .scenarios import (
    DemoScenarios,
    build_scenario,
    fully_connected_topology,
    mixed_links_topology,
    random_topology,
)

__all__ = [
    "DemoRunner",
    "DemoScenarios",
    "run_quick_demo",
    "build_scenario",
    "mixed_links_topology",
    "fully_connected_topology",
    "random_topology",
]
