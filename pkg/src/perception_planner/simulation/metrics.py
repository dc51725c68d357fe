"""
Metrics collector for the load-balance simulator.

Accumulates per-node counters while the event loop runs and turns them into
a ``SimMetrics`` summary (and its CSV form) once the horizon is reached.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import pandas as pd
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

TOTAL_ROW = "total"
CSV_COLUMNS = [
    "node", "frames_completed", "utilization", "mean_latency",
    "arrived", "queued_at_end", "dropped", "imbalance",
]


class NodeMetrics(BaseModel):
    """Per-node results over the horizon."""
    node: str = Field(..., description="Device id")
    frames_completed: int = Field(..., ge=0, description="Frames finished by the horizon")
    utilization: float = Field(..., ge=0.0, le=1.0, description="Busy fraction of the horizon")
    mean_latency: float = Field(..., ge=0.0, description="Mean arrival-to-completion seconds")


class SimTotals(BaseModel):
    """Whole-run frame accounting."""
    arrived: int = Field(..., ge=0)
    completed: int = Field(..., ge=0)
    queued_at_end: int = Field(..., ge=0, description="Dispatched but unfinished at the horizon")
    dropped: int = Field(default=0, ge=0, description="Always 0; frames are never dropped")


class SimMetrics(BaseModel):
    """Summary of one simulation run."""
    nodes: List[NodeMetrics] = Field(default_factory=list)
    totals: SimTotals
    imbalance: float = Field(..., ge=0.0, description="max - min node utilization")
    mean_latency: float = Field(default=0.0, ge=0.0, description="Mean latency over all completed frames")

    def node(self, node_id: str) -> NodeMetrics:
        for item in self.nodes:
            if item.node == node_id:
                return item
        raise KeyError(node_id)

    def to_frame(self) -> pd.DataFrame:
        """One row per node plus a ``total`` row."""
        rows = [
            {
                "node": n.node,
                "frames_completed": n.frames_completed,
                "utilization": n.utilization,
                "mean_latency": n.mean_latency,
            }
            for n in self.nodes
        ]
        mean_utilization = sum(n.utilization for n in self.nodes) / len(self.nodes) if self.nodes else 0.0
        rows.append({
            "node": TOTAL_ROW,
            "frames_completed": self.totals.completed,
            "utilization": mean_utilization,
            "mean_latency": self.mean_latency,
            "arrived": self.totals.arrived,
            "queued_at_end": self.totals.queued_at_end,
            "dropped": self.totals.dropped,
            "imbalance": self.imbalance,
        })
        frame = pd.DataFrame(rows, columns=CSV_COLUMNS)
        return frame.astype({
            "frames_completed": "Int64",
            "arrived": "Int64",
            "queued_at_end": "Int64",
            "dropped": "Int64",
            "utilization": "float64",
            "mean_latency": "float64",
            "imbalance": "float64",
        })

    def to_csv(self, path: Optional[Union[str, Path]] = None) -> str:
        """Render as CSV with six-decimal floats; also write it when ``path`` is given."""
        text = self.to_frame().to_csv(index=False, float_format="%.6f", lineterminator="\n")
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text


class MetricsCollector:
    """
    Collects per-node counters from the simulator.

    Busy time is clipped to the horizon by the caller; the collector only
    sums what it is given.
    """

    def __init__(self, node_ids: Sequence[str]):
        """
        Initialize the collector.

        Args:
            node_ids: Nodes to track, in reporting order
        """
        self.node_ids = list(node_ids)
        self.completed: Dict[str, int] = {n: 0 for n in self.node_ids}
        self.busy_time: Dict[str, float] = {n: 0.0 for n in self.node_ids}
        self.latency_sum: Dict[str, float] = {n: 0.0 for n in self.node_ids}
        self.arrived = 0

    def record_arrival(self) -> None:
        self.arrived += 1

    def record_service(self, node_id: str, busy_seconds: float) -> None:
        self.busy_time[node_id] += busy_seconds

    def record_completion(self, node_id: str, latency: float) -> None:
        self.completed[node_id] += 1
        self.latency_sum[node_id] += latency

    def summarize(self, horizon: float, queued_at_end: int) -> SimMetrics:
        """
        Build the run summary.

        Args:
            horizon: Simulated seconds covered by the run
            queued_at_end: Frames still waiting or in service at the horizon

        Returns:
            SimMetrics for the run
        """
        nodes = []
        for node_id in self.node_ids:
            done = self.completed[node_id]
            nodes.append(NodeMetrics(
                node=node_id,
                frames_completed=done,
                utilization=min(1.0, max(0.0, self.busy_time[node_id] / horizon)),
                mean_latency=self.latency_sum[node_id] / done if done else 0.0,
            ))

        completed = sum(self.completed.values())
        utilizations = [n.utilization for n in nodes]
        imbalance = max(utilizations) - min(utilizations) if utilizations else 0.0

        metrics = SimMetrics(
            nodes=nodes,
            totals=SimTotals(arrived=self.arrived, completed=completed, queued_at_end=queued_at_end),
            imbalance=imbalance,
            mean_latency=sum(self.latency_sum.values()) / completed if completed else 0.0,
        )
        if metrics.totals.arrived != completed + queued_at_end:
            logger.error(
                f"Frame accounting mismatch: arrived={self.arrived}, "
                f"completed={completed}, queued={queued_at_end}"
            )
        return metrics
