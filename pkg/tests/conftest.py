"""
Shared fixtures for the perception planner tests.
"""

import json
import os
from pathlib import Path
from typing import Callable

import pytest

from perception_planner.demo.scenarios import mixed_links_topology
from perception_planner.placement import Topology, serialize_topology


@pytest.fixture
def mixed_links() -> Topology:
    """Three cameras on USB, Ethernet and a relay respectively."""
    return mixed_links_topology()


@pytest.fixture
def write_text(tmp_path: Path) -> Callable[[str, str], Path]:
    """Write ``content`` to ``tmp_path / name`` and return the path."""
    def _write(name: str, content: str) -> Path:
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        return path
    return _write


@pytest.fixture
def write_json(write_text) -> Callable[[str, object], Path]:
    def _write(name: str, document: object) -> Path:
        return write_text(name, json.dumps(document))
    return _write


@pytest.fixture
def mixed_links_file(write_text, mixed_links) -> Path:
    return write_text("mixed_links.json", serialize_topology(mixed_links))


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch, tmp_path):
    """Keep PLANNER_* variables and stray .env files out of the tests."""
    for key in list(os.environ):
        if key.startswith("PLANNER_"):
            monkeypatch.delenv(key, raising=False)
    monkeypatch.chdir(tmp_path)
