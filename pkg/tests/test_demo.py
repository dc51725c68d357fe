"""
Tests for the demo scenarios and the end-to-end runner.
"""

import json

import pytest

from perception_planner.core import Settings
from perception_planner.demo import (
    DemoRunner,
    DemoScenarios,
    build_scenario,
    fully_connected_topology,
    random_topology,
    run_quick_demo,
)
from perception_planner.placement import validate

pytestmark = pytest.mark.integration


class TestScenarios:
    def test_mixed_links_is_valid(self, mixed_links):
        assert validate(mixed_links) == []

    def test_generators_are_seeded(self):
        assert fully_connected_topology(3) == fully_connected_topology(3)
        assert random_topology(3) == random_topology(3)

    def test_fully_connected_shape(self):
        topology = fully_connected_topology(1, n_sensors=3, n_devices=4)
        assert len(topology.sensors) == 3 and len(topology.devices) == 4
        assert len(topology.links.usb) + len(topology.links.enet_sd) == 12
        assert len(topology.links.enet_dd) == 6
        assert validate(topology) == []

    def test_unknown_scenario(self):
        with pytest.raises(ValueError, match="unknown scenario"):
            build_scenario("warehouse")

    @pytest.mark.parametrize("name", DemoScenarios.ALL)
    def test_every_scenario_builds(self, name):
        assert build_scenario(name, seed=4).sensors


class TestRunner:
    def test_mixed_links_run(self, tmp_path):
        runner = DemoRunner(horizon=20.0, output_dir=tmp_path / "out")
        summary = runner.run()

        assert summary["scenario"] == DemoScenarios.MIXED_LINKS
        assert summary["configurations"] == 3
        assert summary["relayed"] == 1
        assert summary["unassigned"] == 0
        assert summary["feasible"] is True
        assert summary["violations"] == 0
        assert summary["oracle_assigned"] == 3
        assert summary["matches_oracle"] is True
        assert summary["frames_arrived"] == summary["frames_completed"] + summary["frames_queued"]

        out = tmp_path / "out"
        for name in ("topology.json", "selection.json", "oracle.json", "sim_metrics.csv", "summary.json"):
            assert (out / name).exists()
        assert json.loads((out / "summary.json").read_text())["configurations"] == 3

    def test_fully_connected_matches_oracle(self):
        summary = DemoRunner(DemoScenarios.FULLY_CONNECTED, horizon=5.0, seed=2, enable_recording=False).run()
        assert summary["matches_oracle"] is True
        assert summary["feasible"] is True

    def test_oracle_skipped_when_too_large(self):
        settings = Settings(oracle_max_sensors=1, oracle_max_devices=1)
        summary = DemoRunner(horizon=5.0, enable_recording=False, settings=settings).run()
        assert summary["matches_oracle"] is None
        assert "oracle_assigned" not in summary

    def test_quick_demo_writes_nothing(self, tmp_path):
        summary = run_quick_demo(horizon=5.0)
        assert summary["configurations"] == 3
        assert not (tmp_path / "demo_outputs").exists()

    def test_same_seed_same_summary(self):
        first = DemoRunner(DemoScenarios.RANDOM, horizon=10.0, seed=5, enable_recording=False).run()
        second = DemoRunner(DemoScenarios.RANDOM, horizon=10.0, seed=5, enable_recording=False).run()
        assert first == second
