"""
Recursive best-fit assignment of sensors to processing devices.

The largest-image sensor still waiting is paired with the most powerful
device still free. If the two are not wired together, another free device
that the sensor does reach acts as a relay and forwards the stream to the
processor over device Ethernet. Both devices are then consumed and the
procedure recurses on what is left.
"""

import logging
from collections import Counter
from typing import Iterable, List, Optional, Sequence, Set

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field

from .topology import Device, LinkSet, Sensor, Topology

logger = logging.getLogger(__name__)

NO_CONNECTIVITY = "no connectivity"
NO_RELAY_PATH = "no relay path"
NO_DEVICES_LEFT = "no devices left"


class Configuration(BaseModel):
    """A sensor bound to its processing device, optionally through a relay."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    sensor: str = Field(..., description="Sensor id")
    processor: str = Field(..., description="Device running detection on the stream")
    relay: Optional[str] = Field(default=None, description="Device that acquires and forwards the stream")

    @property
    def is_relayed(self) -> bool:
        return self.relay is not None

    @property
    def devices(self) -> List[str]:
        return [self.processor] if self.relay is None else [self.processor, self.relay]


class UnassignedSensor(BaseModel):
    """A sensor the selection could not place, and why."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    sensor: str = Field(..., description="Sensor id")
    reason: str = Field(..., description="no connectivity | no relay path | no devices left")


class SelectionResult(BaseModel):
    """Output of ``select``."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    configurations: List[Configuration] = Field(default_factory=list, description="In processing order")
    unassigned_sensors: List[UnassignedSensor] = Field(default_factory=list)
    idle_devices: List[str] = Field(default_factory=list, description="Unused devices, most powerful first")


def sort_sensors(sensors: Iterable[Sensor]) -> List[Sensor]:
    """Largest frame first; ties go to the higher frame rate, then the smaller id."""
    return sorted(sensors, key=lambda s: (-s.pixels, -s.fps, s.id))


def sort_devices(devices: Iterable[Device]) -> List[Device]:
    """Most powerful first; ties go to the smaller id."""
    return sorted(devices, key=lambda d: (-d.power, d.id))


def find_connected(sensor: Sensor, candidates: Sequence[Device], links: LinkSet) -> Optional[Device]:
    """
    Pick the most powerful candidate the sensor streams into directly.

    Args:
        sensor: Sensor looking for an acquisition device
        candidates: Devices to consider (the prospective processor excluded)
        links: Connectivity to test against

    Returns:
        The highest-power directly linked candidate, or None
    """
    connected = [d for d in candidates if links.is_direct(sensor.id, d.id)]
    if not connected:
        return None
    return sort_devices(connected)[0]


def select(topology: Topology) -> SelectionResult:
    """
    Assign sensors to devices in a best-fit manner.

    Constraint violations in the topology are tolerated; whatever cannot be
    placed ends up in ``unassigned_sensors`` with a reason.
    """
    graph = topology.device_graph()
    configurations: List[Configuration] = []
    unassigned: List[UnassignedSensor] = []

    remaining = _hardware_selection(
        list(topology.sensors), list(topology.devices), topology.links, graph,
        configurations, unassigned,
    )

    result = SelectionResult(
        configurations=configurations,
        unassigned_sensors=unassigned,
        idle_devices=[d.id for d in sort_devices(remaining)],
    )
    logger.info(
        f"Selection placed {len(configurations)} sensor(s), "
        f"{len(unassigned)} unassigned, {len(result.idle_devices)} idle device(s)"
    )
    return result


def _hardware_selection(
    sensors: List[Sensor],
    devices: List[Device],
    links: LinkSet,
    graph: nx.Graph,
    configurations: List[Configuration],
    unassigned: List[UnassignedSensor],
) -> List[Device]:
    """One recursion level; returns the devices nobody consumed."""
    if not sensors or not devices:
        for sensor in sort_sensors(sensors):
            unassigned.append(UnassignedSensor(sensor=sensor.id, reason=NO_DEVICES_LEFT))
        return devices

    sensors = sort_sensors(sensors)
    devices = sort_devices(devices)
    sensor, head = sensors[0], devices[0]
    consumed: Set[str] = set()

    if links.is_direct(sensor.id, head.id):
        configurations.append(Configuration(sensor=sensor.id, processor=head.id))
        consumed.add(head.id)
        logger.debug(f"{sensor.id} -> {head.id} (direct)")
    else:
        reachable = nx.node_connected_component(graph, head.id)
        relay = find_connected(sensor, [d for d in devices[1:] if d.id in reachable], links)
        if relay is not None:
            configurations.append(Configuration(sensor=sensor.id, processor=head.id, relay=relay.id))
            consumed.update((head.id, relay.id))
            logger.debug(f"{sensor.id} -> {relay.id} -> {head.id} (relayed)")
        else:
            reason = NO_CONNECTIVITY if find_connected(sensor, devices[1:], links) is None else NO_RELAY_PATH
            unassigned.append(UnassignedSensor(sensor=sensor.id, reason=reason))
            logger.debug(f"{sensor.id} unassigned: {reason}")

    return _hardware_selection(
        sensors[1:], [d for d in devices if d.id not in consumed], links, graph,
        configurations, unassigned,
    )


def verify_configurations(
    topology: Topology,
    configurations: Sequence[Configuration],
    unassigned: Sequence[str] = (),
) -> List[str]:
    """
    List every feasibility or exclusivity breach.

    Args:
        topology: Topology the configurations claim to respect
        configurations: Configurations to check
        unassigned: Sensor ids reported as unassigned alongside them

    Returns:
        Problem descriptions; empty when everything holds
    """
    problems: List[str] = []
    sensor_ids = {s.id for s in topology.sensors}
    device_ids = {d.id for d in topology.devices}
    links = topology.links
    graph = topology.device_graph()

    for config in configurations:
        label = f"({config.sensor}, {config.processor}, {config.relay})"
        if config.sensor not in sensor_ids:
            problems.append(f"{label}: unknown sensor")
            continue
        unknown = [d for d in config.devices if d not in device_ids]
        if unknown:
            problems.append(f"{label}: unknown device(s) {', '.join(unknown)}")
            continue
        if config.relay is None:
            if not links.is_direct(config.sensor, config.processor):
                problems.append(f"{label}: sensor not linked to processor")
        else:
            if not links.is_direct(config.sensor, config.relay):
                problems.append(f"{label}: sensor not linked to relay")
            if config.relay == config.processor:
                problems.append(f"{label}: relay equals processor")
            elif not nx.has_path(graph, config.relay, config.processor):
                problems.append(f"{label}: relay cannot reach processor over enet_dd")

    device_use = Counter(d for c in configurations for d in c.devices)
    for device_id, count in sorted(device_use.items()):
        if count > 1:
            problems.append(f"device {device_id} used {count} times")

    sensor_use = Counter([c.sensor for c in configurations] + list(unassigned))
    for sensor_id, count in sorted(sensor_use.items()):
        if count > 1:
            problems.append(f"sensor {sensor_id} appears {count} times")

    return problems
