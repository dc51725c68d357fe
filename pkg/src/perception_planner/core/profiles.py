"""
Measured detector throughput per device class.

Each entry is the mean frame rate of a detection model on one class of
processing unit, together with its 95% confidence half-width (n = 300
samples per cell). The simulator uses the means as node throughputs and
topology authors can use them as device ``power`` values.
"""

from enum import Enum
from typing import Dict, List, Tuple

from pydantic import BaseModel, Field

from .errors import ProfileLookupError


class DeviceClass(str, Enum):
    """Kinds of processing unit a computer may expose."""
    CPU = "CPU"
    ONBOARD_GPU = "ONBOARD_GPU"
    VPU = "VPU"          # USB-attached inference accelerator


class ThroughputProfile(BaseModel):
    """One measured (model, device class) cell."""
    model: str = Field(..., description="Detection model name")
    device_class: DeviceClass = Field(..., description="Processing unit class")
    mean_fps: float = Field(..., gt=0, description="Mean frames per second")
    half_width: float = Field(..., ge=0, description="95% confidence half-width in fps")

    def render(self) -> str:
        return f"{self.mean_fps:.2f} ± {self.half_width:.2f}"


_MEASUREMENTS: Dict[str, Dict[DeviceClass, Tuple[float, float]]] = {
    "MobileNetv1": {
        DeviceClass.CPU: (14.87, 0.12),
        DeviceClass.ONBOARD_GPU: (19.37, 0.23),
        DeviceClass.VPU: (11.74, 0.07),
    },
    "MobileNetv2": {
        DeviceClass.CPU: (17.35, 0.19),
        DeviceClass.ONBOARD_GPU: (19.96, 0.22),
        DeviceClass.VPU: (10.15, 0.05),
    },
    "SqueezeNet": {
        DeviceClass.CPU: (18.35, 0.22),
        DeviceClass.ONBOARD_GPU: (22.53, 0.28),
        DeviceClass.VPU: (14.82, 0.11),
    },
    "VGG-16": {
        DeviceClass.CPU: (2.49, 0.01),
        DeviceClass.ONBOARD_GPU: (5.15, 0.02),
        DeviceClass.VPU: (2.22, 0.005),
    },
    "YOLOv7-tiny": {
        DeviceClass.CPU: (12.59, 0.07),
        DeviceClass.ONBOARD_GPU: (21.47, 0.22),
        DeviceClass.VPU: (13.67, 0.08),
    },
}

MODELS: Tuple[str, ...] = tuple(_MEASUREMENTS)


def _canonical_model(model: str) -> str:
    for name in MODELS:
        if name.lower() == model.lower():
            return name
    raise ProfileLookupError(f"unknown model {model!r}; known models: {', '.join(MODELS)}")


def get_profile(model: str, device_class: DeviceClass) -> ThroughputProfile:
    """
    Look up the measured throughput of ``model`` on ``device_class``.

    Model names match case-insensitively.
    """
    name = _canonical_model(model)
    mean_fps, half_width = _MEASUREMENTS[name][DeviceClass(device_class)]
    return ThroughputProfile(model=name, device_class=device_class,
                             mean_fps=mean_fps, half_width=half_width)


def throughput_for(model: str, device_class: DeviceClass) -> float:
    """Mean fps of ``model`` on ``device_class``."""
    return get_profile(model, device_class).mean_fps


def all_profiles() -> List[ThroughputProfile]:
    """Every measured cell, model-major in table order."""
    return [get_profile(model, device_class)
            for model in MODELS
            for device_class in DeviceClass]
