"""
Tests for the command-line interface.
"""

import json

import numpy as np
import pytest
from typer.testing import CliRunner

from perception_planner.cli import app

pytestmark = pytest.mark.integration

runner = CliRunner()

DETECTIONS = """image_id,class,score,x,y,w,h
f0,car,0.9,0,0,10,10
f0,person,0.8,20,20,5,8
f1,car,0.7,3,3,6,6
"""
GROUND_TRUTH = """image_id,class,x,y,w,h
f0,car,0,0,10,10
f0,person,20,20,5,8
f1,car,3,3,6,6
"""


@pytest.fixture
def sim_config(write_json):
    return write_json("sim.json", {
        "nodes": [
            {"id": "gpu_a", "throughput": 21.47},
            {"id": "vpu_a", "profile": {"model": "YOLOv7-tiny", "device_class": "VPU"}},
        ],
        "sources": [{"sensor": "cam_m", "frame_rate": 30, "arrival": "poisson"}],
        "horizon": 20,
        "seed": 7,
    })


class TestSelect:
    def test_stdout(self, mixed_links_file):
        result = runner.invoke(app, ["select", "--topology", str(mixed_links_file)])
        assert result.exit_code == 0
        document = json.loads(result.stdout)
        assert [c["sensor"] for c in document["configurations"]] == ["cam_m", "cam_n", "cam_p"]
        assert document["configurations"][0]["relay"] == "cpu_a"
        assert document["configurations"][1]["relay"] is None

    def test_output_is_reproducible(self, mixed_links_file, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        for target in (first, second):
            assert runner.invoke(app, ["select", "-t", str(mixed_links_file), "-o", str(target)]).exit_code == 0
        assert first.read_bytes() == second.read_bytes()

    def test_malformed_topology(self, write_text):
        result = runner.invoke(app, ["select", "--topology", str(write_text("t.json", "{oops"))])
        assert result.exit_code == 2
        assert "error[topology]: malformed document" in result.output

    def test_missing_option_is_usage_error(self):
        assert runner.invoke(app, ["select"]).exit_code == 2


class TestValidate:
    def test_ok(self, mixed_links_file):
        result = runner.invoke(app, ["validate", "--topology", str(mixed_links_file)])
        assert result.exit_code == 0
        assert result.stdout.strip() == "ok"

    def test_violations_exit_1(self, write_json):
        path = write_json("t.json", {
            "sensors": [{"id": "cam0", "width": 10, "height": 10}],
            "devices": [
                {"id": "a", "class": "CPU", "power": 1.0},
                {"id": "b", "class": "VPU", "power": 2.0},
            ],
            "links": {},
        })
        result = runner.invoke(app, ["validate", "--topology", str(path)])
        assert result.exit_code == 1
        lines = result.stdout.strip().splitlines()
        assert len(lines) == 2
        assert "cam0" in lines[0]


class TestOracle:
    def test_report(self, mixed_links_file):
        result = runner.invoke(app, ["oracle", "--topology", str(mixed_links_file)])
        assert result.exit_code == 0
        document = json.loads(result.stdout)
        assert document["score"]["assigned_count"] == 3
        assert document["score"]["relays_used"] == 1
        assert document["score"]["inversions"] == 0

    def test_too_large(self, mixed_links_file):
        result = runner.invoke(app, ["oracle", "--topology", str(mixed_links_file), "--max-sensors", "2"])
        assert result.exit_code == 1
        assert "error[too-large]" in result.output

    def test_limit_from_environment(self, mixed_links_file, monkeypatch):
        monkeypatch.setenv("PLANNER_ORACLE_MAX_DEVICES", "3")
        result = runner.invoke(app, ["oracle", "--topology", str(mixed_links_file)])
        assert result.exit_code == 1


class TestSimulate:
    def test_metrics_csv(self, sim_config):
        result = runner.invoke(app, ["simulate", "--config", str(sim_config)])
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0].startswith("node,frames_completed,utilization")
        assert [line.split(",")[0] for line in lines[1:]] == ["gpu_a", "vpu_a", "total"]

    def test_reproducible_with_trace(self, sim_config, tmp_path):
        outputs = []
        for name in ("a", "b"):
            out, trace = tmp_path / f"{name}.csv", tmp_path / f"{name}_trace.csv"
            result = runner.invoke(app, ["simulate", "-c", str(sim_config), "-o", str(out), "--trace", str(trace)])
            assert result.exit_code == 0
            outputs.append((out.read_bytes(), trace.read_bytes()))
        assert outputs[0] == outputs[1]

    def test_bad_config(self, write_json):
        path = write_json("sim.json", {"nodes": [{"id": "a"}], "horizon": 5})
        result = runner.invoke(app, ["simulate", "--config", str(path)])
        assert result.exit_code == 2
        assert "error[sim-config]" in result.output


class TestEval:
    def test_perfect_detections(self, write_text):
        result = runner.invoke(app, [
            "eval", "-d", str(write_text("d.csv", DETECTIONS)), "-g", str(write_text("g.csv", GROUND_TRUTH)),
        ])
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0] == "threshold,class,AP,mAP"
        assert len(lines) == 201
        assert all(line.endswith(",1.000000,1.000000") for line in lines[1:])

    def test_workers_and_plot(self, write_text, tmp_path):
        out, plot = tmp_path / "report.csv", tmp_path / "sweep.png"
        args = ["eval", "-d", str(write_text("d.csv", DETECTIONS)), "-g", str(write_text("g.csv", GROUND_TRUTH))]
        assert runner.invoke(app, args + ["-o", str(out), "--workers", "3", "--plot", str(plot)]).exit_code == 0
        single = runner.invoke(app, args)
        assert out.read_text() == single.stdout
        assert plot.exists()

    def test_no_ground_truth(self, write_text):
        result = runner.invoke(app, [
            "eval", "-d", str(write_text("d.csv", DETECTIONS)), "-g", str(write_text("g.csv", "image_id,class,x,y,w,h\n")),
        ])
        assert result.exit_code == 1
        assert "error[no-classes]" in result.output


class TestDepth:
    @pytest.fixture
    def uniform_image(self, write_text):
        rows = "\n".join(",".join(["1.5"] * 64) for _ in range(48))
        return write_text("depth.csv", rows + "\n")

    def test_single_box(self, uniform_image):
        result = runner.invoke(app, ["depth", "--image", str(uniform_image), "--box", "20,15,10,10"])
        assert result.exit_code == 0
        assert result.stdout == "1.500000\n"

    def test_outside_image(self, uniform_image):
        result = runner.invoke(app, ["depth", "-i", str(uniform_image), "-b", "100,100,4,4"])
        assert result.exit_code == 1
        assert "error[outside-image]" in result.output

    def test_insufficient_data(self, write_text):
        values = np.zeros((40, 40))
        values[:5, :] = 2.0
        text = "\n".join(",".join(f"{v:g}" for v in row) for row in values)
        result = runner.invoke(app, ["depth", "-i", str(write_text("d.csv", text)), "-b", "15,15,10,10"])
        assert result.exit_code == 1
        assert "error[insufficient-depth]: insufficient depth data" in result.output

    def test_batch(self, uniform_image, write_text):
        detections = write_text("d.csv", DETECTIONS + "f0,bus,0.1,500,500,4,4\n")
        result = runner.invoke(app, ["depth", "-i", str(uniform_image), "--detections", str(detections), "--image-id", "f0"])
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0] == "image_id,class,score,depth_m,error"
        assert lines[1] == "f0,car,0.900000,1.500000,"
        assert lines[-1] == "f0,bus,0.100000,,outside-image"

    @pytest.mark.parametrize(
        "extra",
        [[], ["--box", "1,2,3,4", "--detections", "d.csv"], ["--box", "1,2,3"], ["--box", "1,1,1,1", "--region", "20"]],
    )
    def test_usage_errors(self, uniform_image, extra):
        result = runner.invoke(app, ["depth", "-i", str(uniform_image)] + extra)
        assert result.exit_code == 2
        assert "error[usage]" in result.output

    def test_ragged_csv(self, write_text):
        result = runner.invoke(app, ["depth", "-i", str(write_text("d.csv", "1,2\n3\n")), "-b", "0,0,1,1"])
        assert result.exit_code == 2
        assert "error[depth-image]" in result.output and "row 1" in result.output


class TestStats:
    def test_interval(self, write_text):
        result = runner.invoke(app, ["stats", "--samples", str(write_text("s.csv", "fps\n" + "10\n" * 300))])
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0] == "10.000000 ± 0.000000"
        assert lines[1] == "mean=10.000000 half_width=0.000000 level=0.95 n=300"

    def test_unsupported_level(self, write_text):
        result = runner.invoke(app, ["stats", "-s", str(write_text("s.csv", "1\n2\n")), "--level", "0.8"])
        assert result.exit_code == 2
        assert "error[level]" in result.output

    def test_single_sample(self, write_text):
        result = runner.invoke(app, ["stats", "-s", str(write_text("s.csv", "1\n"))])
        assert result.exit_code == 1
        assert "error[samples]" in result.output


class TestMisc:
    def test_profiles(self):
        result = runner.invoke(app, ["profiles"])
        assert result.exit_code == 0
        assert "YOLOv7-tiny" in result.stdout
        assert "14.87 ± 0.12" in result.stdout

    def test_demo(self, tmp_path):
        result = runner.invoke(app, ["demo", "--horizon", "5", "--output", str(tmp_path / "demo")])
        assert result.exit_code == 0
        assert (tmp_path / "demo" / "summary.json").exists()
        assert "configurations" in result.stdout

    def test_demo_unknown_scenario(self):
        result = runner.invoke(app, ["demo", "--scenario", "warehouse", "--no-recording"])
        assert result.exit_code == 2
        assert "error[usage]" in result.output

    def test_bad_log_level(self, mixed_links_file):
        result = runner.invoke(app, ["--log-level", "LOUD", "validate", "-t", str(mixed_links_file)])
        assert result.exit_code == 2
        assert "error[config]" in result.output
