"""
Runtime settings for the perception planner.

Settings come from the process environment (optionally seeded from a ``.env``
file) and act as defaults for the CLI flags.
"""

import logging
import os
from typing import Mapping, Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

logger = logging.getLogger(__name__)

ENV_PREFIX = "PLANNER_"
LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


def parse_region(text: str) -> Tuple[int, int]:
    """
    Parse a ``WxH`` window size such as ``20x20``.

    Args:
        text: Window size string

    Returns:
        (width, height) in pixels
    """
    parts = text.lower().replace(" ", "").split("x")
    if len(parts) != 2:
        raise ValueError(f"region must look like WxH, got {text!r}")
    try:
        width, height = int(parts[0]), int(parts[1])
    except ValueError:
        raise ValueError(f"region must look like WxH, got {text!r}") from None
    if width < 1 or height < 1:
        raise ValueError(f"region sides must be >= 1, got {text!r}")
    return width, height


class Settings(BaseModel):
    """Defaults shared by the CLI subcommands."""

    log_level: str = Field(default="WARNING", description="Root log level")
    oracle_max_sensors: int = Field(default=6, ge=0, description="Largest |S| the oracle enumerates")
    oracle_max_devices: int = Field(default=6, ge=0, description="Largest |D| the oracle enumerates")
    depth_region: Tuple[int, int] = Field(default=(20, 20), description="Depth window (w, h) in pixels")
    broadcast_interval: float = Field(default=0.5, gt=0, description="Status broadcast period in seconds")
    eval_workers: int = Field(default=1, ge=1, description="Threads used by the IoU threshold sweep")

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"unknown log level {value!r}")
        return level

    @field_validator("depth_region", mode="before")
    @classmethod
    def _region_from_text(cls, value):
        if isinstance(value, str):
            return parse_region(value)
        return value

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None, dotenv: bool = True) -> "Settings":
        """
        Build settings from ``PLANNER_*`` environment variables.

        Args:
            environ: Mapping to read instead of ``os.environ``
            dotenv: Whether to load a ``.env`` file first

        Returns:
            Validated settings
        """
        if dotenv and environ is None:
            load_dotenv()
        source = os.environ if environ is None else environ

        values = {}
        for name in cls.model_fields:
            key = ENV_PREFIX + name.upper()
            if key in source and source[key] != "":
                values[name] = source[key]

        if values:
            logger.debug(f"Settings overridden from environment: {sorted(values)}")
        return cls.model_validate(values)
