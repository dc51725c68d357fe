"""
Demo scenarios for the perception planner.

Besides the named scenarios this module exposes the seeded topology
generators used by the randomized test suites.
"""

from typing import List, Optional, Tuple, Union

import numpy as np

from ..core.profiles import DeviceClass, throughput_for
from ..placement.topology import Device, LinkSet, Sensor, Topology

Seed = Union[int, np.random.Generator, None]

# (width, height) choices for generated sensors
RESOLUTIONS: Tuple[Tuple[int, int], ...] = (
    (320, 240), (640, 480), (848, 480), (1280, 720), (1920, 1080),
)
FRAME_RATES: Tuple[float, ...] = (15.0, 30.0, 60.0)
DEFAULT_MODEL = "YOLOv7-tiny"


class DemoScenarios:
    """Pre-defined demo scenarios."""

    MIXED_LINKS = "mixed_links"
    FULLY_CONNECTED = "fully_connected"
    RANDOM = "random"

    ALL = (MIXED_LINKS, FULLY_CONNECTED, RANDOM)


def _rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def mixed_links_topology() -> Topology:
    """
    Three cameras, four devices and one of each configuration kind.

    The largest camera is plugged into the CPU, which relays it to the
    strongest GPU. The middle one sits on USB of the second GPU and the
    smallest streams over Ethernet to the VPU. All devices share one
    Ethernet segment. Device power is the profile throughput of the default
    model, which ranks the VPU above the CPU, so the relayed placement is
    also the best one.
    """
    sensors = (
        Sensor(id="cam_m", width=1920, height=1080, fps=30),
        Sensor(id="cam_n", width=1280, height=720, fps=30),
        Sensor(id="cam_p", width=640, height=480, fps=30),
    )
    devices = (
        Device(id="gpu_a", device_class=DeviceClass.ONBOARD_GPU, power=throughput_for(DEFAULT_MODEL, DeviceClass.ONBOARD_GPU)),
        Device(id="gpu_b", device_class=DeviceClass.ONBOARD_GPU, power=throughput_for(DEFAULT_MODEL, DeviceClass.ONBOARD_GPU)),
        Device(id="vpu_a", device_class=DeviceClass.VPU, power=throughput_for(DEFAULT_MODEL, DeviceClass.VPU)),
        Device(id="cpu_a", device_class=DeviceClass.CPU, power=throughput_for(DEFAULT_MODEL, DeviceClass.CPU)),
    )
    ids = [d.id for d in devices]
    links = LinkSet(
        usb=(("cam_m", "cpu_a"), ("cam_n", "gpu_b")),
        enet_sd=(("cam_p", "vpu_a"),),
        enet_dd=tuple((a, b) for i, a in enumerate(ids) for b in ids[i + 1:]),
    )
    return Topology(sensors=sensors, devices=devices, links=links)


def _random_sensors(rng: np.random.Generator, count: int) -> List[Sensor]:
    sensors = []
    for index in range(count):
        width, height = RESOLUTIONS[int(rng.integers(len(RESOLUTIONS)))]
        fps = FRAME_RATES[int(rng.integers(len(FRAME_RATES)))]
        sensors.append(Sensor(id=f"s{index}", width=width, height=height, fps=fps))
    return sensors


def _random_devices(rng: np.random.Generator, count: int) -> List[Device]:
    classes = list(DeviceClass)
    return [
        Device(
            id=f"d{index}",
            device_class=classes[int(rng.integers(len(classes)))],
            power=round(float(rng.uniform(2.0, 25.0)), 2),
        )
        for index in range(count)
    ]


def fully_connected_topology(
    seed: Seed = None,
    n_sensors: Optional[int] = None,
    n_devices: Optional[int] = None,
    max_size: int = 5,
) -> Topology:
    """
    Every sensor reaches every device directly and all devices share Ethernet.

    Sizes not given are drawn from ``1..max_size``; each sensor-device link is
    USB or Ethernet at random.
    """
    rng = _rng(seed)
    n_sensors = n_sensors or int(rng.integers(1, max_size + 1))
    n_devices = n_devices or int(rng.integers(1, max_size + 1))
    sensors = _random_sensors(rng, n_sensors)
    devices = _random_devices(rng, n_devices)

    usb, enet_sd = [], []
    for sensor in sensors:
        for device in devices:
            (usb if rng.random() < 0.5 else enet_sd).append((sensor.id, device.id))
    ids = [d.id for d in devices]
    enet_dd = [(a, b) for i, a in enumerate(ids) for b in ids[i + 1:]]
    return Topology(
        sensors=tuple(sensors),
        devices=tuple(devices),
        links=LinkSet(usb=tuple(usb), enet_sd=tuple(enet_sd), enet_dd=tuple(enet_dd)),
    )


def random_topology(
    seed: Seed = None,
    n_sensors: Optional[int] = None,
    n_devices: Optional[int] = None,
    max_size: int = 5,
    link_probability: float = 0.35,
    share_probability: float = 0.5,
) -> Topology:
    """
    Partially connected topology; constraints may or may not hold.

    Each sensor-device pair is linked with ``link_probability`` (USB or
    Ethernet at random) and each device pair shares Ethernet with
    ``share_probability``.
    """
    rng = _rng(seed)
    n_sensors = n_sensors or int(rng.integers(1, max_size + 1))
    n_devices = n_devices or int(rng.integers(1, max_size + 1))
    sensors = _random_sensors(rng, n_sensors)
    devices = _random_devices(rng, n_devices)

    usb, enet_sd = [], []
    for sensor in sensors:
        for device in devices:
            if rng.random() < link_probability:
                (usb if rng.random() < 0.5 else enet_sd).append((sensor.id, device.id))
    enet_dd = [
        (a.id, b.id)
        for i, a in enumerate(devices)
        for b in devices[i + 1:]
        if rng.random() < share_probability
    ]
    return Topology(
        sensors=tuple(sensors),
        devices=tuple(devices),
        links=LinkSet(usb=tuple(usb), enet_sd=tuple(enet_sd), enet_dd=tuple(enet_dd)),
    )


def build_scenario(name: str, seed: Seed = 0) -> Topology:
    """Topology of a named scenario."""
    if name == DemoScenarios.MIXED_LINKS:
        return mixed_links_topology()
    if name == DemoScenarios.FULLY_CONNECTED:
        return fully_connected_topology(seed)
    if name == DemoScenarios.RANDOM:
        return random_topology(seed)
    raise ValueError(f"unknown scenario {name!r}; choose one of {', '.join(DemoScenarios.ALL)}")
