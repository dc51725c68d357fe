"""
Tests for topology parsing, serialization and constraint validation.
"""

import json

import pytest

from perception_planner.core.errors import TopologyParseError
from perception_planner.demo.scenarios import random_topology
from perception_planner.placement import (
    LinkSet,
    load_topology,
    parse_topology,
    serialize_topology,
    validate,
)

pytestmark = pytest.mark.unit


def _doc(**overrides):
    document = {
        "sensors": [
            {"id": "cam0", "width": 1920, "height": 1080, "fps": 30},
            {"id": "cam1", "width": 640, "height": 480},
        ],
        "devices": [
            {"id": "gpu0", "class": "ONBOARD_GPU", "power": 21.47},
            {"id": "cpu0", "class": "CPU", "power": 12.59},
        ],
        "links": {
            "usb": [["cam0", "gpu0"]],
            "enet_sd": [["cam1", "cpu0"]],
            "enet_dd": [["gpu0", "cpu0"]],
        },
    }
    document.update(overrides)
    return document


class TestParse:
    def test_parses_and_applies_defaults(self):
        topology = parse_topology(json.dumps(_doc()))
        assert [s.id for s in topology.sensors] == ["cam0", "cam1"]
        assert topology.sensor("cam1").fps == 30
        assert topology.sensor("cam0").pixels == 1920 * 1080
        assert topology.device("gpu0").power == 21.47

    def test_links_are_normalized(self):
        topology = parse_topology(json.dumps(_doc()))
        assert topology.links.enet_dd == (("cpu0", "gpu0"),)
        assert topology.links.is_direct("cam0", "gpu0")
        assert not topology.links.is_direct("cam0", "cpu0")
        assert topology.links.link_kind("cam1", "cpu0") == "enet"
        assert topology.links.link_kind("cam0", "gpu0") == "usb"
        assert topology.links.link_kind("cam0", "cpu0") is None

    def test_duplicate_pairs_collapse(self):
        links = LinkSet(enet_dd=(("a", "b"), ("b", "a"), ("a", "b")))
        assert links.enet_dd == (("a", "b"),)

    def test_malformed_json(self):
        with pytest.raises(TopologyParseError, match="malformed document"):
            parse_topology("{not json")

    def test_top_level_must_be_object(self):
        with pytest.raises(TopologyParseError, match="top level"):
            parse_topology("[]")

    def test_unknown_key_rejected(self):
        document = _doc()
        document["sensors"][0]["zoom"] = 2
        with pytest.raises(TopologyParseError, match=r"sensors\[0\]\.zoom"):
            parse_topology(json.dumps(document))

    def test_field_name_is_not_a_document_key(self):
        document = _doc()
        document["sensors"][0]["frame_rate"] = 15
        with pytest.raises(TopologyParseError, match=r"sensors\[0\]\.frame_rate"):
            parse_topology(json.dumps(document))

    def test_duplicate_sensor_id(self):
        document = _doc()
        document["sensors"][1]["id"] = "cam0"
        with pytest.raises(TopologyParseError, match=r"sensors\[1\]\.id: duplicate sensor id 'cam0'"):
            parse_topology(json.dumps(document))

    def test_unknown_reference(self):
        document = _doc()
        document["links"]["usb"].append(["cam9", "gpu0"])
        with pytest.raises(TopologyParseError, match=r"unknown sensor id 'cam9'"):
            parse_topology(json.dumps(document))

    def test_unknown_device_class(self):
        document = _doc()
        document["devices"][0]["class"] = "TPU"
        with pytest.raises(TopologyParseError, match=r"devices\[0\]\.class"):
            parse_topology(json.dumps(document))

    def test_self_pair_rejected(self):
        document = _doc()
        document["links"]["enet_dd"] = [["gpu0", "gpu0"]]
        with pytest.raises(TopologyParseError, match="self-pair"):
            parse_topology(json.dumps(document))

    def test_non_positive_size(self):
        document = _doc()
        document["sensors"][0]["width"] = 0
        with pytest.raises(TopologyParseError, match=r"sensors\[0\]\.width"):
            parse_topology(json.dumps(document))

    def test_missing_file(self, tmp_path):
        with pytest.raises(TopologyParseError, match="cannot read"):
            load_topology(tmp_path / "absent.json")


class TestSerialize:
    def test_uses_documented_keys(self, mixed_links):
        document = json.loads(serialize_topology(mixed_links))
        assert set(document) == {"sensors", "devices", "links"}
        assert "fps" in document["sensors"][0]
        assert "class" in document["devices"][0]

    @pytest.mark.parametrize("seed", range(20))
    def test_reparse_is_identity(self, seed):
        topology = random_topology(seed)
        assert parse_topology(serialize_topology(topology)) == topology


class TestValidate:
    def test_clean_topology(self, mixed_links):
        assert validate(mixed_links) == []

    def test_sensor_without_link(self):
        document = _doc()
        document["links"]["enet_sd"] = []
        violations = validate(parse_topology(json.dumps(document)))
        assert [(v.constraint, v.subject) for v in violations] == [(2, "cam1")]

    def test_partitioned_devices(self):
        document = _doc()
        document["devices"].append({"id": "vpu0", "class": "VPU", "power": 13.67})
        violations = validate(parse_topology(json.dumps(document)))
        assert len(violations) == 1
        assert violations[0].constraint == 3
        assert violations[0].partition == (("cpu0", "gpu0"), ("vpu0",))
        assert "2 Ethernet components" in violations[0].render()

    def test_lenient_ignores_isolated_device(self):
        document = _doc()
        document["devices"].append({"id": "vpu0", "class": "VPU", "power": 13.67})
        assert validate(parse_topology(json.dumps(document)), require_sharing=False) == []

    def test_single_device_needs_no_sharing(self):
        document = _doc(
            devices=[{"id": "gpu0", "class": "ONBOARD_GPU", "power": 21.47}],
            links={"usb": [["cam0", "gpu0"], ["cam1", "gpu0"]]},
        )
        assert validate(parse_topology(json.dumps(document))) == []

    def test_violations_sorted(self):
        document = _doc(links={"enet_dd": []})
        violations = validate(parse_topology(json.dumps(document)))
        assert [(v.constraint, v.subject) for v in violations] == [
            (2, "cam0"), (2, "cam1"), (3, "enet_dd"),
        ]
