"""
Normal-approximation confidence intervals for frame-rate measurements.
"""

import logging
import math
from typing import Dict, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.stats import norm

from ..core.errors import InsufficientSamplesError, UnsupportedLevelError

logger = logging.getLogger(__name__)

SUPPORTED_LEVELS: Tuple[float, ...] = (0.90, 0.95, 0.99)

# two-sided z_{alpha/2}, six decimals as in printed tables
Z_TABLE: Dict[float, float] = {
    level: round(float(norm.ppf(0.5 + level / 2)), 6) for level in SUPPORTED_LEVELS
}


class SampleSet(BaseModel):
    """Repeated measurements of one quantity, e.g. frames per second."""
    model_config = ConfigDict(frozen=True)

    values: Tuple[float, ...] = Field(..., description="Measurements")

    @field_validator("values")
    @classmethod
    def _finite(cls, values: Tuple[float, ...]) -> Tuple[float, ...]:
        if not all(math.isfinite(v) for v in values):
            raise ValueError("samples must be finite numbers")
        return values

    @property
    def n(self) -> int:
        return len(self.values)


class ConfidenceInterval(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean: float
    half_width: float = Field(..., ge=0)
    level: float
    n: int

    @property
    def lower(self) -> float:
        return self.mean - self.half_width

    @property
    def upper(self) -> float:
        return self.mean + self.half_width

    def render(self, decimals: int = 2) -> str:
        """``mean ± half_width``, the way throughput tables report it."""
        return f"{self.mean:.{decimals}f} ± {self.half_width:.{decimals}f}"


def z_value(level: float) -> float:
    for supported, z in Z_TABLE.items():
        if math.isclose(level, supported, abs_tol=1e-9):
            return z
    raise UnsupportedLevelError(
        f"unsupported confidence level {level:g}; choose one of "
        + ", ".join(f"{lv:.2f}" for lv in SUPPORTED_LEVELS)
    )


def confidence_interval(samples: SampleSet, level: float = 0.95) -> ConfidenceInterval:
    """
    Mean and half-width ``z * s / sqrt(n)`` with the sample standard deviation.

    Raises:
        InsufficientSamplesError: fewer than two samples
        UnsupportedLevelError: level outside 0.90 / 0.95 / 0.99
    """
    z = z_value(level)
    if samples.n < 2:
        raise InsufficientSamplesError(f"need at least 2 samples, got {samples.n}")

    values = np.asarray(samples.values, dtype=np.float64)
    mean = float(np.mean(values))
    s = float(np.std(values, ddof=1))
    half_width = z * s / math.sqrt(samples.n)
    logger.debug(f"n={samples.n} mean={mean} s={s} z={z}")
    return ConfidenceInterval(mean=mean, half_width=half_width, level=level, n=samples.n)
