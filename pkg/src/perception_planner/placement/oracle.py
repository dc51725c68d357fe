"""
Exhaustive reference placement for small instances.

Enumerates every maximal feasible assignment and ranks them by:

1. more sensors placed,
2. fewer inversions (a larger-frame sensor on a strictly weaker processor
   than a smaller-frame sensor),
3. fewer relays,
4. rank signature: for each sensor in ``sort_sensors`` order, the position
   of its processor and relay in ``sort_devices`` order (unplaced = |D|).

The last key is total, so the best assignment is unique.
"""

import logging
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import InstanceTooLargeError
from .selection import Configuration, sort_devices, sort_sensors
from .topology import Topology

logger = logging.getLogger(__name__)

DEFAULT_MAX_SENSORS = 6
DEFAULT_MAX_DEVICES = 6


class Assignment(BaseModel):
    """A set of configurations, listed in sensor rank order."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    configurations: Tuple[Configuration, ...] = Field(default=(), description="Chosen configurations")

    def configuration_set(self) -> frozenset:
        return frozenset(self.configurations)


class Score(BaseModel):
    """Quality of an assignment; compare with ``sort_key`` (smaller is better)."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    assigned_count: int = Field(..., ge=0, description="Sensors placed")
    inversions: int = Field(..., ge=0, description="Size/power order inversions")
    relays_used: int = Field(..., ge=0, description="Relayed configurations")
    rank_signature: Tuple[int, ...] = Field(default=(), description="Final tiebreak")

    def sort_key(self) -> Tuple:
        return (-self.assigned_count, self.inversions, self.relays_used, self.rank_signature)

    def better_than(self, other: "Score") -> bool:
        return self.sort_key() < other.sort_key()


class OracleReport(BaseModel):
    """Document written by the ``oracle`` command."""
    assignment: Assignment
    score: Score


class _Instance:
    """Precomputed lookups shared by enumeration and scoring."""

    def __init__(self, topology: Topology):
        self.sensors = sort_sensors(topology.sensors)
        self.devices = sort_devices(topology.devices)
        self.pixels: Dict[str, int] = {s.id: s.pixels for s in self.sensors}
        self.power: Dict[str, float] = {d.id: d.power for d in self.devices}
        self.device_rank: Dict[str, int] = {d.id: i for i, d in enumerate(self.devices)}

        component: Dict[str, int] = {}
        graph = topology.device_graph()
        for index, members in enumerate(nx.connected_components(graph)):
            for device_id in members:
                component[device_id] = index

        links = topology.links
        self.options: List[List[Configuration]] = []
        for sensor in self.sensors:
            direct = [Configuration(sensor=sensor.id, processor=d.id)
                      for d in self.devices if links.is_direct(sensor.id, d.id)]
            relayed = [
                Configuration(sensor=sensor.id, processor=proc.id, relay=relay.id)
                for proc in self.devices if not links.is_direct(sensor.id, proc.id)
                for relay in self.devices
                if relay.id != proc.id
                and links.is_direct(sensor.id, relay.id)
                and component[relay.id] == component[proc.id]
            ]
            self.options.append(direct + relayed)

    def score(self, configurations: Sequence[Configuration]) -> Score:
        inversions = 0
        for i, a in enumerate(configurations):
            for b in configurations[i + 1:]:
                if self.pixels[a.sensor] > self.pixels[b.sensor] and self.power[a.processor] < self.power[b.processor]:
                    inversions += 1
                elif self.pixels[b.sensor] > self.pixels[a.sensor] and self.power[b.processor] < self.power[a.processor]:
                    inversions += 1

        unplaced = len(self.devices)
        by_sensor = {c.sensor: c for c in configurations}
        signature: List[int] = []
        for sensor in self.sensors:
            config = by_sensor.get(sensor.id)
            if config is None:
                signature.extend((unplaced, unplaced))
            else:
                signature.append(self.device_rank[config.processor])
                signature.append(unplaced if config.relay is None else self.device_rank[config.relay])

        return Score(
            assigned_count=len(configurations),
            inversions=inversions,
            relays_used=sum(1 for c in configurations if c.relay is not None),
            rank_signature=tuple(signature),
        )

    def maximal(self) -> Iterator[Tuple[Configuration, ...]]:
        """Yield every maximal feasible assignment in depth-first order."""
        chosen: List[Configuration] = []
        skipped: List[int] = []
        used: set = set()

        def extend(index: int) -> Iterator[Tuple[Configuration, ...]]:
            if index == len(self.sensors):
                if self._is_maximal(skipped, used):
                    yield tuple(chosen)
                return
            for option in self.options[index]:
                devices = option.devices
                if any(d in used for d in devices):
                    continue
                chosen.append(option)
                used.update(devices)
                yield from extend(index + 1)
                used.difference_update(devices)
                chosen.pop()
            skipped.append(index)
            yield from extend(index + 1)
            skipped.pop()

        yield from extend(0)

    def _is_maximal(self, skipped: Sequence[int], used: set) -> bool:
        for index in skipped:
            for option in self.options[index]:
                if not any(d in used for d in option.devices):
                    return False
        return True


def _check_size(topology: Topology, max_sensors: int, max_devices: int) -> None:
    if len(topology.sensors) > max_sensors or len(topology.devices) > max_devices:
        raise InstanceTooLargeError(
            f"instance too large for exhaustive search: |S|={len(topology.sensors)}, "
            f"|D|={len(topology.devices)} (limits {max_sensors} and {max_devices})"
        )


def enumerate_assignments(
    topology: Topology,
    max_sensors: int = DEFAULT_MAX_SENSORS,
    max_devices: int = DEFAULT_MAX_DEVICES,
) -> List[Assignment]:
    """
    List every maximal feasible assignment.

    Raises:
        InstanceTooLargeError: more sensors or devices than the limits
    """
    _check_size(topology, max_sensors, max_devices)
    instance = _Instance(topology)
    return [Assignment(configurations=configs) for configs in instance.maximal()]


def score_assignment(topology: Topology, configurations: Sequence[Configuration]) -> Score:
    """Score any configuration list (e.g. a ``select`` result) on the oracle's scale."""
    return _Instance(topology).score(list(configurations))


def best_assignment(
    topology: Topology,
    max_sensors: int = DEFAULT_MAX_SENSORS,
    max_devices: int = DEFAULT_MAX_DEVICES,
) -> Tuple[Assignment, Score]:
    """
    Find the best maximal feasible assignment.

    Raises:
        InstanceTooLargeError: more sensors or devices than the limits
    """
    _check_size(topology, max_sensors, max_devices)
    instance = _Instance(topology)

    best: Optional[Tuple[Configuration, ...]] = None
    best_score: Optional[Score] = None
    examined = 0
    for configs in instance.maximal():
        examined += 1
        score = instance.score(configs)
        if best_score is None or score.better_than(best_score):
            best, best_score = configs, score

    assert best is not None and best_score is not None  # a maximal assignment always exists
    logger.info(f"Oracle examined {examined} maximal assignment(s); best places {best_score.assigned_count}")
    return Assignment(configurations=best), best_score
