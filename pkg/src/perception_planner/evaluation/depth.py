"""
Object distance from a depth image.

The depth of a detection is the mean of the depth pixels in a fixed
``region_w x region_h`` window centred on its bounding box. Window index
ranges are half-open so exactly ``region_w * region_h`` pixels are averaged
before clipping to the image. Zero pixels carry no reading and are left out
of the mean; at least half of the clipped window must hold readings.

Depth images are read from CSV (metres, row-major) or from 16-bit binary PGM
(millimetres).
"""

import logging
import math
import re
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import cv2
import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..core.errors import (
    DepthImageFormatError,
    DomainError,
    InsufficientDepthDataError,
    PointOutsideImageError,
    describe_validation_error,
)
from .detection import BBox, Detection

logger = logging.getLogger(__name__)

DEFAULT_REGION = (20, 20)
PGM_SCALE = 0.001  # metres per PGM unit
# pandas C parser: "Expected 2 fields in line 3, saw 3"
_LONG_ROW = re.compile(r"Expected (\d+) fields in line (\d+), saw (\d+)")


class DepthImage(BaseModel):
    """Dense depth map in metres; 0.0 means no reading."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray = Field(..., description="(height, width) float64 metres")

    @field_validator("values", mode="before")
    @classmethod
    def _as_matrix(cls, values) -> np.ndarray:
        array = np.asarray(values, dtype=np.float64)
        if array.ndim != 2 or array.size == 0:
            raise ValueError(f"depth values must be a non-empty 2-D matrix, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ValueError("depth values must be finite")
        if np.any(array < 0):
            raise ValueError("depth values must be >= 0")
        array.setflags(write=False)
        return array

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    def at(self, row: int, col: int) -> float:
        return float(self.values[row, col])


class Region(BaseModel):
    """Averaging window: centre point and size in pixels."""
    model_config = ConfigDict(frozen=True)

    center: Tuple[float, float] = Field(..., description="(x0, y0) in pixels")
    w: int = Field(default=DEFAULT_REGION[0], ge=1)
    h: int = Field(default=DEFAULT_REGION[1], ge=1)

    @classmethod
    def around(cls, box: BBox, w: int = DEFAULT_REGION[0], h: int = DEFAULT_REGION[1]) -> "Region":
        return cls(center=(box.x + box.w / 2, box.y + box.h / 2), w=w, h=h)

    def bounds(self, image: DepthImage) -> Tuple[int, int, int, int]:
        """Clipped half-open ``(row0, row1, col0, col1)`` of the window."""
        col = math.floor(self.center[0])
        row = math.floor(self.center[1])
        col0, row0 = col - self.w // 2, row - self.h // 2
        return (
            max(0, row0), min(image.height, row0 + self.h),
            max(0, col0), min(image.width, col0 + self.w),
        )


class DepthEstimate(BaseModel):
    """One row of a batch estimate."""
    image_id: str
    class_label: str
    score: float
    depth_m: Optional[float] = None
    error: Optional[str] = Field(default=None, description="Error kind when no estimate was possible")


def load_depth_image(path: Union[str, Path]) -> DepthImage:
    """
    Read a depth image.

    Files starting with the binary PGM magic ``P5`` are decoded as 16-bit
    millimetre maps; anything else is parsed as CSV in metres.

    Raises:
        DepthImageFormatError: unreadable file, ragged CSV rows, non-numeric
            cells, 8-bit PGM or negative values
    """
    path = Path(path)
    try:
        with path.open("rb") as handle:
            magic = handle.read(2)
    except OSError as e:
        raise DepthImageFormatError(f"cannot read {path}: {e.strerror or e}") from e

    if magic == b"P5":
        return _load_pgm(path)
    return _load_csv(path)


def _load_pgm(path: Path) -> DepthImage:
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise DepthImageFormatError(f"{path}: not a decodable PGM image")
    if raw.dtype != np.uint16:
        raise DepthImageFormatError(f"{path}: expected a 16-bit PGM, got {raw.dtype}")
    logger.info(f"Loaded PGM depth image {path} ({raw.shape[1]}x{raw.shape[0]})")
    return DepthImage(values=raw.astype(np.float64) * PGM_SCALE)


def _load_csv(path: Path) -> DepthImage:
    try:
        frame = pd.read_csv(path, header=None, skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise DepthImageFormatError(f"{path}: no depth values") from None
    except pd.errors.ParserError as e:
        # longer rows than the first one stop the parser
        match = _LONG_ROW.search(str(e))
        if match is None:
            raise DepthImageFormatError(f"{path}: {e}") from e
        expected, line, seen = (int(g) for g in match.groups())
        raise DepthImageFormatError(
            f"{path}: row {line - 1} has {seen} values, expected {expected}"
        ) from e
    except UnicodeDecodeError as e:
        raise DepthImageFormatError(f"{path}: {e}") from e

    width = frame.shape[1]
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    for index in range(len(frame)):
        present = frame.iloc[index].notna()
        if not present.all():
            raise DepthImageFormatError(
                f"{path}: row {index} has {int(present.sum())} values, expected {width}"
            )
        bad = present & numeric.iloc[index].isna()
        if bad.any():
            raise DepthImageFormatError(
                f"{path}: row {index}: {frame.iloc[index][bad].iloc[0]!r} is not a number"
            )
    try:
        return DepthImage(values=numeric.to_numpy(dtype=np.float64))
    except ValidationError as e:
        raise DepthImageFormatError(f"{path}: {describe_validation_error(e)}") from e


def estimate_depth(
    image: DepthImage,
    box: BBox,
    region_w: int = DEFAULT_REGION[0],
    region_h: int = DEFAULT_REGION[1],
) -> float:
    """
    Mean depth of the window centred on ``box``.

    Returns:
        Depth in metres

    Raises:
        PointOutsideImageError: the box centre lies outside the image
        InsufficientDepthDataError: fewer than half of the clipped window
            pixels hold a reading
    """
    region = Region.around(box, region_w, region_h)
    x0, y0 = region.center
    if not (0 <= x0 < image.width and 0 <= y0 < image.height):
        raise PointOutsideImageError(
            f"box centre ({x0:g}, {y0:g}) outside {image.width}x{image.height} image"
        )

    row0, row1, col0, col1 = region.bounds(image)
    window = image.values[row0:row1, col0:col1]
    valid = window[window > 0]
    if valid.size * 2 < window.size:
        raise InsufficientDepthDataError(
            f"insufficient depth data: {valid.size} of {window.size} window pixels valid"
        )
    return float(np.mean(valid))


def estimate_depths(
    image: DepthImage,
    detections: Sequence[Detection],
    region: Tuple[int, int] = DEFAULT_REGION,
) -> List[DepthEstimate]:
    """
    Estimate every detection on one image, keeping going past failures.

    Boxes that cannot be estimated carry the error kind instead of a depth.
    """
    results: List[DepthEstimate] = []
    for det in detections:
        entry = DepthEstimate(image_id=det.image_id, class_label=det.class_label, score=det.score)
        try:
            entry.depth_m = estimate_depth(image, det.box, region[0], region[1])
        except DomainError as e:
            entry.error = e.kind
            logger.debug(f"{det.image_id}/{det.class_label}: {e}")
        results.append(entry)
    logger.info(f"Estimated {sum(r.depth_m is not None for r in results)} of {len(results)} depth(s)")
    return results
