"""
Core components shared across the perception planner.
"""

from .config import Settings, parse_region
from .errors import (
    DomainError,
    InputFormatError,
    PlannerError,
)
from .profiles import DeviceClass, ThroughputProfile, all_profiles, get_profile, throughput_for

__all__ = [
    "Settings",
    "parse_region",
    "PlannerError",
    "InputFormatError",
    "DomainError",
    "DeviceClass",
    "ThroughputProfile",
    "all_profiles",
    "get_profile",
    "throughput_for",
]
