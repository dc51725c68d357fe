"""
Demo runner for the perception planner.

Takes one scenario through the whole pipeline: selection, feasibility
check, comparison against the exhaustive oracle and a load-balance
simulation of the chosen processors.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from ..core.config import Settings
from ..core.errors import InstanceTooLargeError
from ..placement import (
    OracleReport,
    best_assignment,
    score_assignment,
    select,
    serialize_topology,
    validate,
    verify_configurations,
)
from ..placement.topology import Topology
from ..simulation import ArrivalProcess, config_from_selection, run_sim
from .scenarios import DEFAULT_MODEL, DemoScenarios, build_scenario

logger = logging.getLogger(__name__)


class DemoRunner:
    """
    Runs a scenario end to end and records what happened.

    With recording enabled the topology, selection, oracle result, simulation
    metrics and summary are written to ``output_dir``.
    """

    def __init__(
        self,
        scenario: str = DemoScenarios.MIXED_LINKS,
        model: str = DEFAULT_MODEL,
        horizon: float = 60.0,
        seed: int = 0,
        enable_recording: bool = True,
        output_dir: Optional[Path] = None,
        settings: Optional[Settings] = None,
    ):
        """
        Initialize the demo runner.

        Args:
            scenario: One of ``DemoScenarios.ALL``
            model: Detection model whose profile sets node throughputs
            horizon: Simulated seconds
            seed: Seed for generated topologies and Poisson arrivals
            enable_recording: Whether to write outputs
            output_dir: Directory to save outputs
            settings: Oracle limits and broadcast interval
        """
        self.scenario = scenario
        self.model = model
        self.horizon = horizon
        self.seed = seed
        self.enable_recording = enable_recording
        self.output_dir = Path(output_dir) if output_dir is not None else Path("demo_outputs")
        self.settings = settings or Settings()

        if self.enable_recording:
            self.output_dir.mkdir(parents=True, exist_ok=True)

        logger.info(f"DemoRunner initialized: {scenario}")

    def run(self, topology: Optional[Topology] = None) -> Dict[str, Any]:
        """
        Run the pipeline.

        Args:
            topology: Use this topology instead of building the scenario

        Returns:
            Flat summary of the run
        """
        topology = topology or build_scenario(self.scenario, self.seed)
        logger.info(f"Starting demo {self.scenario}: {len(topology.sensors)} sensors, {len(topology.devices)} devices")

        violations = validate(topology)
        result = select(topology)
        problems = verify_configurations(
            topology, result.configurations, [u.sensor for u in result.unassigned_sensors]
        )
        for problem in problems:
            logger.error(f"Infeasible selection: {problem}")

        summary: Dict[str, Any] = {
            "scenario": self.scenario,
            "sensors": len(topology.sensors),
            "devices": len(topology.devices),
            "violations": len(violations),
            "configurations": len(result.configurations),
            "relayed": sum(1 for c in result.configurations if c.is_relayed),
            "unassigned": len(result.unassigned_sensors),
            "idle_devices": len(result.idle_devices),
            "feasible": not problems,
        }

        select_score = score_assignment(topology, result.configurations)
        summary["select_inversions"] = select_score.inversions
        oracle: Optional[OracleReport] = None
        try:
            assignment, score = best_assignment(
                topology, self.settings.oracle_max_sensors, self.settings.oracle_max_devices
            )
            oracle = OracleReport(assignment=assignment, score=score)
            summary["oracle_assigned"] = score.assigned_count
            summary["oracle_inversions"] = score.inversions
            summary["matches_oracle"] = assignment.configuration_set() == frozenset(result.configurations)
        except InstanceTooLargeError as e:
            logger.warning(f"Skipping oracle comparison: {e}")
            summary["matches_oracle"] = None

        metrics = None
        if result.configurations:
            config = config_from_selection(
                topology, result, self.model, self.horizon,
                broadcast_interval=self.settings.broadcast_interval,
                seed=self.seed,
                arrival=ArrivalProcess.POISSON,
            )
            metrics = run_sim(config)
            summary.update({
                "frames_arrived": metrics.totals.arrived,
                "frames_completed": metrics.totals.completed,
                "frames_queued": metrics.totals.queued_at_end,
                "imbalance": round(metrics.imbalance, 6),
            })

        if self.enable_recording:
            self._save(topology, result, oracle, metrics, summary)

        logger.info("Demo completed")
        return summary

    def _save(self, topology, result, oracle, metrics, summary: Dict[str, Any]) -> None:
        out = self.output_dir
        (out / "topology.json").write_text(serialize_topology(topology) + "\n", encoding="utf-8")
        (out / "selection.json").write_text(result.model_dump_json(indent=2) + "\n", encoding="utf-8")
        if oracle is not None:
            (out / "oracle.json").write_text(oracle.model_dump_json(indent=2) + "\n", encoding="utf-8")
        if metrics is not None:
            metrics.to_csv(out / "sim_metrics.csv")
        with open(out / "summary.json", "w", encoding="utf-8") as f:
            json.dump(summary, f, indent=2)
        logger.info(f"Demo outputs written to {out}")


def run_quick_demo(scenario: str = DemoScenarios.MIXED_LINKS, horizon: float = 30.0) -> Dict[str, Any]:
    """Run a scenario without writing anything."""
    return DemoRunner(scenario=scenario, horizon=horizon, enable_recording=False).run()
