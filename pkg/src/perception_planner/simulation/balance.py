"""
Discrete-event simulation of frames spread over cooperating devices.

Every device broadcasts its queue length and throughput to its peers on a
fixed tick. Arriving frames are dispatched to the device with the smallest
expected completion time according to the last broadcast, corrected by the
frames the dispatcher itself sent out since that tick. Service is
deterministic at ``1 / throughput`` seconds per frame; frames are never
dropped.

A simulation config is a JSON document::

    {
      "nodes": [
        {"id": "gpu_a", "throughput": 21.47},
        {"id": "vpu_a", "profile": {"model": "YOLOv7-tiny", "device_class": "VPU"}}
      ],
      "sources": [{"sensor": "cam_m", "frame_rate": 30, "arrival": "poisson"}],
      "broadcast_interval": 0.5,
      "horizon": 60,
      "seed": 7
    }
"""

import heapq
import json
import logging
from collections import deque
from enum import Enum
from pathlib import Path
from typing import Deque, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..core.errors import ProfileLookupError, SimConfigError, describe_validation_error
from ..core.profiles import DeviceClass, throughput_for
from ..placement.selection import SelectionResult
from ..placement.topology import Topology
from .metrics import MetricsCollector, SimMetrics

logger = logging.getLogger(__name__)

DEFAULT_BROADCAST_INTERVAL = 0.5

# Same-instant ordering: finished work frees a node before peers hear about
# it, and peers hear about it before new frames are dispatched.
_COMPLETION, _BROADCAST, _ARRIVAL = 0, 1, 2


class ArrivalProcess(str, Enum):
    DETERMINISTIC = "deterministic"
    POISSON = "poisson"


class EventKind(str, Enum):
    ARRIVAL = "arrival"
    DISPATCH = "dispatch"
    COMPLETION = "completion"
    BROADCAST = "broadcast"


class ProfileRef(BaseModel):
    """Throughput taken from the measured profile table."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    model: str = Field(..., description="Detection model name")
    device_class: DeviceClass = Field(..., description="Processing unit class")


class NodeSpec(BaseModel):
    """A simulated device; exactly one of ``throughput`` and ``profile`` is given."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    id: str = Field(..., min_length=1, description="Device id")
    throughput: Optional[float] = Field(default=None, gt=0, description="Frames per second")
    profile: Optional[ProfileRef] = Field(default=None, description="Profile lookup instead of a number")

    @model_validator(mode="after")
    def _resolve_throughput(self) -> "NodeSpec":
        if (self.throughput is None) == (self.profile is None):
            raise ValueError("give exactly one of 'throughput' and 'profile'")
        if self.profile is not None:
            try:
                throughput_for(self.profile.model, self.profile.device_class)
            except ProfileLookupError as e:
                raise ValueError(str(e)) from e
        return self

    @property
    def rate(self) -> float:
        """Effective frames per second."""
        if self.throughput is not None:
            return self.throughput
        return throughput_for(self.profile.model, self.profile.device_class)


class SourceSpec(BaseModel):
    """A sensor emitting frames."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    sensor: str = Field(..., min_length=1, description="Sensor id")
    frame_rate: float = Field(..., gt=0, description="Mean frames per second")
    arrival: ArrivalProcess = Field(default=ArrivalProcess.DETERMINISTIC, description="Inter-arrival law")


class SimConfig(BaseModel):
    """One simulation run."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    nodes: Tuple[NodeSpec, ...] = Field(..., min_length=1, description="Processing devices")
    sources: Tuple[SourceSpec, ...] = Field(default=(), description="Frame sources")
    broadcast_interval: float = Field(default=DEFAULT_BROADCAST_INTERVAL, gt=0, description="Seconds between status ticks")
    horizon: float = Field(..., gt=0, description="Simulated seconds")
    seed: int = Field(default=0, ge=0, description="Seeds every random stream")

    @model_validator(mode="after")
    def _unique_ids(self) -> "SimConfig":
        for path, ids in (("nodes", [n.id for n in self.nodes]), ("sources", [s.sensor for s in self.sources])):
            seen = set()
            for index, item_id in enumerate(ids):
                if item_id in seen:
                    raise ValueError(f"{path}[{index}]: duplicate id {item_id!r}")
                seen.add(item_id)
        return self


class NodeStatus(BaseModel):
    """What a node tells its peers on a broadcast tick."""
    model_config = ConfigDict(frozen=True)

    node: str
    queue_length: int = Field(..., ge=0, description="Frames waiting or in service")
    throughput: float = Field(..., gt=0)
    timestamp: float = Field(..., ge=0, description="Tick time in simulated seconds")


class SimEvent(BaseModel):
    """One line of the event trace."""
    model_config = ConfigDict(frozen=True)

    time: float
    kind: EventKind
    node: Optional[str] = None
    frame: Optional[int] = None
    source: Optional[str] = None
    status_time: Optional[float] = Field(default=None, description="Timestamp of the statuses a dispatch used")


def schedule(frame: Optional[int], statuses: Sequence[NodeStatus]) -> str:
    """
    Choose the node that would finish ``frame`` first.

    Expected completion is ``(queue_length + 1) / throughput``; ties go to the
    smaller node id.

    Args:
        frame: Frame being dispatched (only used for logging)
        statuses: Known status of every candidate node

    Returns:
        Id of the chosen node
    """
    if not statuses:
        raise ValueError("schedule needs at least one node status")
    best = min(statuses, key=lambda s: ((s.queue_length + 1) / s.throughput, s.node))
    logger.debug(f"frame {frame} -> {best.node}")
    return best.node


class _Node:
    """Mutable per-device state inside one run."""

    def __init__(self, spec: NodeSpec):
        self.id = spec.id
        self.throughput = spec.rate
        self.service_time = 1.0 / self.throughput
        self.queue: Deque[Tuple[int, float]] = deque()  # (frame, arrival time); head is in service
        self.busy = False

    def status(self, now: float) -> NodeStatus:
        return NodeStatus(node=self.id, queue_length=len(self.queue), throughput=self.throughput, timestamp=now)


class BalanceSimulator:
    """
    Virtual-clock event loop for one ``SimConfig``.

    Runs are independent; build one simulator per run.
    """

    def __init__(self, config: SimConfig, record_events: bool = False):
        """
        Initialize the simulator.

        Args:
            config: Validated run configuration
            record_events: Keep the full event trace in ``events``
        """
        self.config = config
        self.record_events = record_events
        self.events: List[SimEvent] = []

        self._nodes: Dict[str, _Node] = {spec.id: _Node(spec) for spec in config.nodes}
        self._collector = MetricsCollector([spec.id for spec in config.nodes])
        self._heap: List[Tuple[float, int, int, tuple]] = []
        self._seq = 0
        self._next_frame = 0
        self._statuses: List[NodeStatus] = []
        self._dispatched_since_tick: Dict[str, int] = {n: 0 for n in self._nodes}
        self._rngs = [
            np.random.default_rng(child)
            for child in np.random.SeedSequence(config.seed).spawn(len(config.sources))
        ]
        self._arrival_counts = [0] * len(config.sources)
        self._last_arrival = [0.0] * len(config.sources)

    def run(self) -> SimMetrics:
        """Execute the run up to the horizon and summarize it."""
        horizon = self.config.horizon

        tick = 0
        while tick * self.config.broadcast_interval <= horizon:
            self._push(tick * self.config.broadcast_interval, _BROADCAST, ())
            tick += 1
        for index in range(len(self.config.sources)):
            self._schedule_arrival(index)

        while self._heap:
            now, order, _, payload = heapq.heappop(self._heap)
            if now > horizon:
                break
            if order == _COMPLETION:
                self._on_completion(now, *payload)
            elif order == _BROADCAST:
                self._on_broadcast(now)
            else:
                self._on_arrival(now, *payload)

        queued = sum(len(node.queue) for node in self._nodes.values())
        metrics = self._collector.summarize(horizon, queued)
        logger.info(
            f"Simulation finished: arrived={metrics.totals.arrived} "
            f"completed={metrics.totals.completed} queued={queued} "
            f"imbalance={metrics.imbalance:.4f}"
        )
        return metrics

    def _push(self, time: float, order: int, payload: tuple) -> None:
        heapq.heappush(self._heap, (time, order, self._seq, payload))
        self._seq += 1

    def _record(self, **fields) -> None:
        if self.record_events:
            self.events.append(SimEvent(**fields))

    def _schedule_arrival(self, index: int) -> None:
        source = self.config.sources[index]
        count = self._arrival_counts[index]
        if source.arrival is ArrivalProcess.DETERMINISTIC:
            time = count / source.frame_rate
        else:
            time = self._last_arrival[index] + float(self._rngs[index].exponential(1.0 / source.frame_rate))
            self._last_arrival[index] = time
        if time < self.config.horizon:
            self._push(time, _ARRIVAL, (index,))

    def _on_broadcast(self, now: float) -> None:
        self._statuses = [node.status(now) for node in self._nodes.values()]
        self._dispatched_since_tick = {n: 0 for n in self._nodes}
        for status in self._statuses:
            self._record(time=now, kind=EventKind.BROADCAST, node=status.node, status_time=now)

    def _on_arrival(self, now: float, index: int) -> None:
        source = self.config.sources[index]
        frame = self._next_frame
        self._next_frame += 1
        self._arrival_counts[index] += 1
        self._collector.record_arrival()
        self._record(time=now, kind=EventKind.ARRIVAL, frame=frame, source=source.sensor)

        known = [
            s.model_copy(update={"queue_length": s.queue_length + self._dispatched_since_tick[s.node]})
            for s in self._statuses
        ]
        target = schedule(frame, known)
        self._dispatched_since_tick[target] += 1
        status_time = self._statuses[0].timestamp
        self._record(time=now, kind=EventKind.DISPATCH, node=target, frame=frame,
                     source=source.sensor, status_time=status_time)

        node = self._nodes[target]
        node.queue.append((frame, now))
        if not node.busy:
            self._start_service(node, now)

        self._schedule_arrival(index)

    def _start_service(self, node: _Node, now: float) -> None:
        node.busy = True
        done = now + node.service_time
        self._collector.record_service(node.id, min(done, self.config.horizon) - now)
        self._push(done, _COMPLETION, (node.id,))

    def _on_completion(self, now: float, node_id: str) -> None:
        node = self._nodes[node_id]
        frame, arrived_at = node.queue.popleft()
        node.busy = False
        self._collector.record_completion(node_id, now - arrived_at)
        self._record(time=now, kind=EventKind.COMPLETION, node=node_id, frame=frame)
        if node.queue:
            self._start_service(node, now)


def run_sim(config: SimConfig) -> SimMetrics:
    """Run one simulation; equal configs give identical metrics."""
    return BalanceSimulator(config).run()


def run_sim_traced(config: SimConfig) -> Tuple[SimMetrics, List[SimEvent]]:
    """Run one simulation and keep every event."""
    simulator = BalanceSimulator(config, record_events=True)
    metrics = simulator.run()
    return metrics, simulator.events


def parse_sim_config(text: str) -> SimConfig:
    """Parse a JSON simulation config."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise SimConfigError(f"malformed document: {e}") from e
    if not isinstance(document, dict):
        raise SimConfigError("malformed document: top level must be an object")
    try:
        return SimConfig.model_validate(document)
    except ValidationError as e:
        raise SimConfigError(describe_validation_error(e)) from e


def load_sim_config(path: Union[str, Path]) -> SimConfig:
    """Read and parse a simulation config file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SimConfigError(f"cannot read {path}: {e.strerror or e}") from e
    return parse_sim_config(text)


def config_from_selection(
    topology: Topology,
    result: SelectionResult,
    model: str,
    horizon: float,
    broadcast_interval: float = DEFAULT_BROADCAST_INTERVAL,
    seed: int = 0,
    arrival: ArrivalProcess = ArrivalProcess.DETERMINISTIC,
) -> SimConfig:
    """
    Build a simulation of a selection outcome.

    One node per processing device, with the profile throughput of ``model``
    on that device's class, and one source per placed sensor at its frame rate.

    Raises:
        SimConfigError: the selection placed no sensor
        ProfileLookupError: ``model`` is not in the profile table
    """
    if not result.configurations:
        raise SimConfigError("selection placed no sensors; nothing to simulate")
    throughput_for(model, DeviceClass.CPU)  # fail fast on an unknown model

    nodes = [
        NodeSpec(id=config.processor,
                 profile=ProfileRef(model=model, device_class=topology.device(config.processor).device_class))
        for config in result.configurations
    ]
    sources = [
        SourceSpec(sensor=config.sensor, frame_rate=topology.sensor(config.sensor).fps, arrival=arrival)
        for config in result.configurations
    ]
    return SimConfig(nodes=tuple(nodes), sources=tuple(sources), broadcast_interval=broadcast_interval,
                     horizon=horizon, seed=seed)


def events_frame(events: Sequence[SimEvent]) -> pd.DataFrame:
    """Event trace as a table, one row per event."""
    columns = ["time", "kind", "node", "frame", "source", "status_time"]
    frame = pd.DataFrame([e.model_dump(mode="json") for e in events], columns=columns)
    return frame.astype({"time": "float64", "frame": "Int64", "status_time": "float64"})


def write_events_csv(events: Sequence[SimEvent], path: Union[str, Path]) -> None:
    """Write the event trace with six-decimal times."""
    events_frame(events).to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
