"""
Tests for the load-balance simulator and its metrics.
"""

import json

import pandas as pd
import pytest
from pydantic import ValidationError

from perception_planner.core import DeviceClass
from perception_planner.core.errors import ProfileLookupError, SimConfigError
from perception_planner.placement import select
from perception_planner.simulation import (
    ArrivalProcess,
    EventKind,
    MetricsCollector,
    NodeSpec,
    NodeStatus,
    SimConfig,
    SourceSpec,
    config_from_selection,
    load_sim_config,
    parse_sim_config,
    run_sim,
    run_sim_traced,
    schedule,
    write_events_csv,
)

pytestmark = pytest.mark.unit


def _status(node, queue_length, throughput, timestamp=0.0):
    return NodeStatus(node=node, queue_length=queue_length, throughput=throughput, timestamp=timestamp)


def _config(nodes, sources=(), horizon=10.0, **kwargs):
    return SimConfig(
        nodes=tuple(NodeSpec(id=n, throughput=t) for n, t in nodes),
        sources=tuple(sources),
        horizon=horizon,
        **kwargs,
    )


class TestSchedule:
    def test_prefers_earliest_completion(self):
        assert schedule(0, [_status("A", 2, 20.0), _status("B", 0, 10.0)]) == "B"

    def test_tie_goes_to_smaller_id(self):
        assert schedule(0, [_status("b", 1, 10.0), _status("a", 1, 10.0)]) == "a"

    def test_empty_statuses(self):
        with pytest.raises(ValueError):
            schedule(0, [])


class TestRuns:
    def test_no_sources(self):
        metrics = run_sim(_config([("a", 5.0), ("b", 7.0)]))
        assert metrics.totals.arrived == 0
        assert metrics.totals.completed == 0
        assert metrics.imbalance == 0.0
        assert all(n.utilization == 0.0 for n in metrics.nodes)

    def test_single_node_half_loaded(self):
        config = _config([("n0", 20.0)], [SourceSpec(sensor="cam", frame_rate=10.0)], horizon=10.0)
        metrics = run_sim(config)
        assert metrics.totals.arrived == 100
        assert abs(metrics.totals.completed - 100) <= 1
        assert metrics.node("n0").utilization == pytest.approx(0.5, abs=0.01)
        assert metrics.node("n0").mean_latency == pytest.approx(0.05)

    def test_two_identical_nodes_balance(self):
        config = _config(
            [("a", 20.0), ("b", 20.0)],
            [SourceSpec(sensor="cam", frame_rate=20.0, arrival=ArrivalProcess.POISSON)],
            horizon=300.0,
            seed=7,
        )
        metrics = run_sim(config)
        assert metrics.imbalance < 0.05
        assert metrics.totals.completed > 0

    def test_overload_keeps_every_frame(self):
        config = _config([("slow", 2.0)], [SourceSpec(sensor="cam", frame_rate=10.0)], horizon=5.0)
        metrics = run_sim(config)
        totals = metrics.totals
        assert totals.dropped == 0
        assert totals.arrived == totals.completed + totals.queued_at_end
        assert totals.queued_at_end > 0
        assert metrics.node("slow").utilization == pytest.approx(1.0)

    @pytest.mark.parametrize("seed", range(10))
    def test_frame_conservation(self, seed):
        config = _config(
            [("a", 9.0), ("b", 4.5), ("c", 13.0)],
            [
                SourceSpec(sensor="s0", frame_rate=12.0, arrival=ArrivalProcess.POISSON),
                SourceSpec(sensor="s1", frame_rate=6.0),
            ],
            horizon=30.0,
            seed=seed,
        )
        metrics = run_sim(config)
        totals = metrics.totals
        assert totals.arrived == totals.completed + totals.queued_at_end
        assert sum(n.frames_completed for n in metrics.nodes) == totals.completed
        assert all(0.0 <= n.utilization <= 1.0 for n in metrics.nodes)

    def test_deterministic_output(self):
        config = _config(
            [("a", 9.0), ("b", 4.5)],
            [SourceSpec(sensor="s0", frame_rate=12.0, arrival=ArrivalProcess.POISSON)],
            horizon=20.0,
            seed=3,
        )
        assert run_sim(config).to_csv() == run_sim(config).to_csv()

    def test_longer_horizon_never_loses_frames(self):
        def totals(horizon):
            config = _config(
                [("a", 9.0), ("b", 4.5)],
                [SourceSpec(sensor="s0", frame_rate=12.0, arrival=ArrivalProcess.POISSON)],
                horizon=horizon,
                seed=11,
            )
            return run_sim(config).totals

        short, long = totals(10.0), totals(20.0)
        assert short.arrived <= long.arrived
        assert short.completed <= long.completed

    def test_dispatch_uses_last_broadcast(self):
        config = _config(
            [("a", 9.0), ("b", 4.5)],
            [SourceSpec(sensor="s0", frame_rate=12.0, arrival=ArrivalProcess.POISSON)],
            horizon=10.0,
            broadcast_interval=0.25,
        )
        _, events = run_sim_traced(config)
        dispatches = [e for e in events if e.kind is EventKind.DISPATCH]
        assert dispatches
        for event in dispatches:
            assert event.status_time <= event.time
            assert event.time - event.status_time < 0.25 + 1e-9

    def test_trace_csv(self, tmp_path):
        config = _config([("a", 9.0)], [SourceSpec(sensor="s0", frame_rate=2.0)], horizon=2.0)
        _, events = run_sim_traced(config)
        path = tmp_path / "trace.csv"
        write_events_csv(events, path)
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["time", "kind", "node", "frame", "source", "status_time"]
        assert (frame["kind"] == "arrival").sum() == 4


class TestMetricsCsv:
    def test_columns_and_total_row(self):
        config = _config([("a", 20.0)], [SourceSpec(sensor="cam", frame_rate=10.0)], horizon=10.0)
        text = run_sim(config).to_csv()
        lines = text.splitlines()
        assert lines[0] == "node,frames_completed,utilization,mean_latency,arrived,queued_at_end,dropped,imbalance"
        assert lines[-1].startswith("total,")
        assert "0.500000" in lines[1]

    def test_collector_clips_utilization(self):
        collector = MetricsCollector(["a"])
        collector.record_service("a", 12.0)
        assert collector.summarize(10.0, 0).node("a").utilization == 1.0


class TestConfig:
    def test_profile_node(self):
        spec = NodeSpec(id="v", profile={"model": "YOLOv7-tiny", "device_class": "VPU"})
        assert spec.rate == 13.67

    @pytest.mark.parametrize(
        "document",
        [
            {"id": "x"},
            {"id": "x", "throughput": 3.0, "profile": {"model": "VGG-16", "device_class": "CPU"}},
            {"id": "x", "profile": {"model": "ResNet", "device_class": "CPU"}},
            {"id": "x", "throughput": 0},
        ],
    )
    def test_bad_node(self, document):
        with pytest.raises(ValidationError):
            NodeSpec.model_validate(document)

    def test_parse_and_defaults(self, write_json):
        path = write_json("sim.json", {"nodes": [{"id": "a", "throughput": 4}], "horizon": 5})
        config = load_sim_config(path)
        assert config.broadcast_interval == 0.5
        assert config.seed == 0
        assert config.sources == ()

    def test_duplicate_node(self):
        document = {"nodes": [{"id": "a", "throughput": 4}, {"id": "a", "throughput": 5}], "horizon": 5}
        with pytest.raises(SimConfigError, match=r"nodes\[1\]: duplicate id 'a'"):
            parse_sim_config(json.dumps(document))

    @pytest.mark.parametrize(
        "text",
        [
            "not json",
            "[1, 2]",
            json.dumps({"nodes": [], "horizon": 5}),
            json.dumps({"nodes": [{"id": "a", "throughput": 4}], "horizon": 0}),
            json.dumps({"nodes": [{"id": "a", "throughput": 4}], "horizon": 5, "extra": 1}),
        ],
    )
    def test_rejected_documents(self, text):
        with pytest.raises(SimConfigError):
            parse_sim_config(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SimConfigError, match="cannot read"):
            load_sim_config(tmp_path / "absent.json")


class TestFromSelection:
    def test_nodes_follow_processors(self, mixed_links):
        config = config_from_selection(mixed_links, select(mixed_links), "YOLOv7-tiny", horizon=30.0)
        assert [n.id for n in config.nodes] == ["gpu_a", "gpu_b", "vpu_a"]
        assert [n.profile.device_class for n in config.nodes] == [
            DeviceClass.ONBOARD_GPU, DeviceClass.ONBOARD_GPU, DeviceClass.VPU,
        ]
        assert [s.sensor for s in config.sources] == ["cam_m", "cam_n", "cam_p"]
        assert all(s.frame_rate == 30 for s in config.sources)
        assert run_sim(config).totals.arrived > 0

    def test_unknown_model(self, mixed_links):
        with pytest.raises(ProfileLookupError):
            config_from_selection(mixed_links, select(mixed_links), "ResNet", horizon=30.0)

    def test_nothing_placed(self):
        from perception_planner.placement import SelectionResult, Topology

        with pytest.raises(SimConfigError, match="no sensors"):
            config_from_selection(Topology(), SelectionResult(), "YOLOv7-tiny", horizon=5.0)
