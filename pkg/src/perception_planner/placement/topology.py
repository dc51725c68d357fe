"""
Sensor / device / link graph consumed by the hardware selection algorithm.

A topology file is a JSON document::

    {
      "sensors": [{"id": "cam0", "width": 1920, "height": 1080, "fps": 30}],
      "devices": [{"id": "gpu0", "class": "ONBOARD_GPU", "power": 21.47}],
      "links": {
        "usb":     [["cam0", "gpu0"]],
        "enet_sd": [],
        "enet_dd": [["gpu0", "cpu0"]]
      }
    }

``fps`` defaults to 30. Unknown keys are rejected at every level. Link pairs
are normalized on load (deduplicated and sorted; device-device pairs are
unordered), so serializing and re-parsing yields an equal topology.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..core.errors import TopologyParseError, describe_validation_error
from ..core.profiles import DeviceClass

logger = logging.getLogger(__name__)

Pair = Tuple[str, str]

USB = "usb"
ENET = "enet"


class Sensor(BaseModel):
    """A camera producing frames of a fixed size."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    id: str = Field(..., min_length=1, description="Unique sensor id")
    width: int = Field(..., ge=1, description="Frame width in pixels")
    height: int = Field(..., ge=1, description="Frame height in pixels")
    fps: float = Field(default=30.0, gt=0, description="Frames per second")

    @property
    def pixels(self) -> int:
        return self.width * self.height


class Device(BaseModel):
    """A processing unit ranked by computational power."""
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    id: str = Field(..., min_length=1, description="Unique device id")
    device_class: DeviceClass = Field(..., alias="class", description="CPU, ONBOARD_GPU or VPU")
    power: float = Field(..., gt=0, description="Relative computational power")


class LinkSet(BaseModel):
    """USB, sensor-Ethernet and device-Ethernet connectivity."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    usb: Tuple[Pair, ...] = Field(default=(), description="(sensor, device) USB attachments")
    enet_sd: Tuple[Pair, ...] = Field(default=(), description="(sensor, device) Ethernet streams")
    enet_dd: Tuple[Pair, ...] = Field(default=(), description="Unordered (device, device) Ethernet pairs")

    @field_validator("usb", "enet_sd")
    @classmethod
    def _normalize_directed(cls, pairs: Tuple[Pair, ...]) -> Tuple[Pair, ...]:
        return tuple(sorted(set(pairs)))

    @field_validator("enet_dd")
    @classmethod
    def _normalize_undirected(cls, pairs: Tuple[Pair, ...]) -> Tuple[Pair, ...]:
        normalized = set()
        for index, (a, b) in enumerate(pairs):
            if a == b:
                raise ValueError(f"item {index} is a self-pair ({a!r}, {b!r})")
            normalized.add((a, b) if a < b else (b, a))
        return tuple(sorted(normalized))

    def is_direct(self, sensor_id: str, device_id: str) -> bool:
        """True when the sensor streams straight into the device (USB or Ethernet)."""
        pair = (sensor_id, device_id)
        return pair in self.usb or pair in self.enet_sd

    def link_kind(self, sensor_id: str, device_id: str) -> Optional[str]:
        """``"usb"``, ``"enet"`` or None; USB wins when both exist."""
        pair = (sensor_id, device_id)
        if pair in self.usb:
            return USB
        if pair in self.enet_sd:
            return ENET
        return None


class Topology(BaseModel):
    """Sensors, devices and the links between them."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    sensors: Tuple[Sensor, ...] = Field(default=(), description="Available sensors")
    devices: Tuple[Device, ...] = Field(default=(), description="Available devices")
    links: LinkSet = Field(default_factory=LinkSet, description="Connectivity")

    @model_validator(mode="after")
    def _check_references(self) -> "Topology":
        sensor_ids = _unique_ids("sensors", "sensor", [s.id for s in self.sensors])
        device_ids = _unique_ids("devices", "device", [d.id for d in self.devices])

        for kind in ("usb", "enet_sd"):
            for index, (sensor_id, device_id) in enumerate(getattr(self.links, kind)):
                if sensor_id not in sensor_ids:
                    raise ValueError(f"links.{kind}[{index}]: unknown sensor id {sensor_id!r}")
                if device_id not in device_ids:
                    raise ValueError(f"links.{kind}[{index}]: unknown device id {device_id!r}")
        for index, pair in enumerate(self.links.enet_dd):
            for device_id in pair:
                if device_id not in device_ids:
                    raise ValueError(f"links.enet_dd[{index}]: unknown device id {device_id!r}")
        return self

    def sensor(self, sensor_id: str) -> Sensor:
        for sensor in self.sensors:
            if sensor.id == sensor_id:
                return sensor
        raise KeyError(sensor_id)

    def device(self, device_id: str) -> Device:
        for device in self.devices:
            if device.id == device_id:
                return device
        raise KeyError(device_id)

    def device_graph(self) -> nx.Graph:
        """Device Ethernet graph; every device is a node even without links."""
        graph = nx.Graph()
        graph.add_nodes_from(d.id for d in self.devices)
        graph.add_edges_from(self.links.enet_dd)
        return graph


class Violation(BaseModel):
    """A breach of the connectivity constraints."""
    model_config = ConfigDict(frozen=True)

    constraint: int = Field(..., description="2 = sensor without a link, 3 = device Ethernet partition")
    subject: str = Field(..., description="Offending sensor id, or 'enet_dd' for a partition")
    detail: str = Field(..., description="Human readable explanation")
    partition: Tuple[Tuple[str, ...], ...] = Field(default=(), description="Device components when split")

    def render(self) -> str:
        return f"constraint={self.constraint} subject={self.subject} {self.detail}"


def _unique_ids(path: str, noun: str, ids: List[str]) -> set:
    seen: Dict[str, int] = {}
    for index, item_id in enumerate(ids):
        if item_id in seen:
            raise ValueError(f"{path}[{index}].id: duplicate {noun} id {item_id!r}")
        seen[item_id] = index
    return set(seen)


def parse_topology(text: str) -> Topology:
    """
    Parse a topology document.

    Args:
        text: JSON topology document

    Returns:
        Topology with references resolved and defaults applied

    Raises:
        TopologyParseError: malformed JSON, schema breach, duplicate id or
            dangling link, with the path to the offending element
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise TopologyParseError(f"malformed document: {e}") from e
    if not isinstance(document, dict):
        raise TopologyParseError("malformed document: top level must be an object")

    try:
        topology = Topology.model_validate(document)
    except ValidationError as e:
        raise TopologyParseError(describe_validation_error(e)) from e

    logger.info(f"Parsed topology: {len(topology.sensors)} sensors, {len(topology.devices)} devices")
    return topology


def serialize_topology(topology: Topology) -> str:
    """Emit the documented JSON form; ``parse_topology`` inverts it."""
    return topology.model_dump_json(by_alias=True, indent=2)


def load_topology(path: Union[str, Path]) -> Topology:
    """Read and parse a topology file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise TopologyParseError(f"cannot read {path}: {e.strerror or e}") from e
    return parse_topology(text)


def validate(topology: Topology, require_sharing: bool = True) -> List[Violation]:
    """
    Check the connectivity constraints.

    Constraint (2): every sensor has at least one USB or sensor-Ethernet link.
    Constraint (3): devices can share streams over Ethernet. With
    ``require_sharing`` every device must sit in one enet_dd component once
    there is more than one device; otherwise only devices that appear in some
    enet_dd pair are checked.

    Returns:
        Violations sorted by (constraint, subject); empty when both hold
    """
    violations: List[Violation] = []

    linked = {s for s, _ in topology.links.usb} | {s for s, _ in topology.links.enet_sd}
    for sensor in topology.sensors:
        if sensor.id not in linked:
            violations.append(Violation(
                constraint=2,
                subject=sensor.id,
                detail="sensor has no usb or enet_sd link",
            ))

    graph = topology.device_graph()
    if require_sharing:
        nodes = [d.id for d in topology.devices] if len(topology.devices) > 1 else []
    else:
        nodes = sorted({d for pair in topology.links.enet_dd for d in pair})
    if nodes:
        components = sorted(
            tuple(sorted(component))
            for component in nx.connected_components(graph.subgraph(nodes))
        )
        if len(components) > 1:
            listing = " | ".join("{" + ",".join(c) + "}" for c in components)
            violations.append(Violation(
                constraint=3,
                subject="enet_dd",
                detail=f"devices split into {len(components)} Ethernet components: {listing}",
                partition=tuple(components),
            ))

    violations.sort(key=lambda v: (v.constraint, v.subject))
    logger.info(f"Validation found {len(violations)} violation(s)")
    return violations
