"""
CSV readers and writers for the evaluation commands.

Detections: ``image_id,class,score,x,y,w,h``. Ground truth: the same
without ``score``. Samples: one numeric column, header optional. Every
numeric output is written with six decimals.
"""

import logging
from pathlib import Path
from typing import List, Sequence, Union

import pandas as pd
from pydantic import ValidationError

from ..core.errors import TableFormatError, describe_validation_error
from .depth import DepthEstimate
from .detection import BBox, Detection, EvalReport, GroundTruthBox
from .stats import SampleSet

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DETECTION_COLUMNS = ["image_id", "class", "score", "x", "y", "w", "h"]
GROUND_TRUTH_COLUMNS = ["image_id", "class", "x", "y", "w", "h"]
DEPTH_COLUMNS = ["image_id", "class", "score", "depth_m", "error"]
FLOAT_FORMAT = "%.6f"


def _read_table(path: PathLike, columns: Sequence[str]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype={"image_id": str, "class": str}, skipinitialspace=True)
    except FileNotFoundError as e:
        raise TableFormatError(f"cannot read {path}: no such file") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise TableFormatError(f"{path}: {e}") from e

    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise TableFormatError(f"{path}: missing column(s) {', '.join(missing)}")
    frame = frame[list(columns)].copy()
    for column in columns:
        if column in ("image_id", "class"):
            continue
        numeric = pd.to_numeric(frame[column], errors="coerce")
        bad = numeric.isna()
        if bad.any():
            row = int(bad.idxmax())
            raise TableFormatError(f"{path}: row {row}: column {column!r} is not a number")
        frame[column] = numeric.astype(float)
    if frame["image_id"].isna().any() or frame["class"].isna().any():
        row = int((frame["image_id"].isna() | frame["class"].isna()).idxmax())
        raise TableFormatError(f"{path}: row {row}: empty image_id or class")
    return frame


def load_detections(path: PathLike) -> List[Detection]:
    """Read scored detections."""
    frame = _read_table(path, DETECTION_COLUMNS)
    detections = []
    for row, record in enumerate(frame.to_dict("records")):
        try:
            detections.append(Detection(
                image_id=record["image_id"],
                class_label=record["class"],
                score=record["score"],
                box=BBox(x=record["x"], y=record["y"], w=record["w"], h=record["h"]),
            ))
        except ValidationError as e:
            raise TableFormatError(f"{path}: row {row}: {describe_validation_error(e)}") from e
    logger.info(f"Loaded {len(detections)} detection(s) from {path}")
    return detections


def load_ground_truth(path: PathLike) -> List[GroundTruthBox]:
    """Read annotated boxes."""
    frame = _read_table(path, GROUND_TRUTH_COLUMNS)
    boxes = []
    for row, record in enumerate(frame.to_dict("records")):
        try:
            boxes.append(GroundTruthBox(
                image_id=record["image_id"],
                class_label=record["class"],
                box=BBox(x=record["x"], y=record["y"], w=record["w"], h=record["h"]),
            ))
        except ValidationError as e:
            raise TableFormatError(f"{path}: row {row}: {describe_validation_error(e)}") from e
    logger.info(f"Loaded {len(boxes)} ground-truth box(es) from {path}")
    return boxes


def load_samples(path: PathLike) -> SampleSet:
    """
    Read a one-column sample file.

    A first line that is not a number is taken as the header.
    """
    try:
        frame = pd.read_csv(path, header=None, skip_blank_lines=True, dtype=str)
    except FileNotFoundError as e:
        raise TableFormatError(f"cannot read {path}: no such file") from e
    except pd.errors.EmptyDataError:
        return SampleSet(values=())
    except pd.errors.ParserError as e:
        raise TableFormatError(f"{path}: {e}") from e

    if frame.shape[1] != 1:
        raise TableFormatError(f"{path}: expected one column, found {frame.shape[1]}")
    column = frame.iloc[:, 0].str.strip()
    values = pd.to_numeric(column, errors="coerce")
    if len(values) and pd.isna(values.iloc[0]):
        column, values = column.iloc[1:], values.iloc[1:]
    if values.isna().any():
        row = int(values.isna().idxmax())
        raise TableFormatError(f"{path}: row {row}: {column.loc[row]!r} is not a number")
    try:
        return SampleSet(values=tuple(float(v) for v in values))
    except ValidationError as e:
        raise TableFormatError(f"{path}: {describe_validation_error(e)}") from e


def write_report(report: EvalReport, path: PathLike) -> None:
    """Write the sweep as ``threshold,class,AP,mAP`` rows."""
    report.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote evaluation report to {path}")


def write_depth_estimates(estimates: Sequence[DepthEstimate], path: PathLike) -> None:
    """Write batch depth estimates; failed rows have an empty depth and an error kind."""
    frame = pd.DataFrame(
        [(e.image_id, e.class_label, e.score, e.depth_m, e.error) for e in estimates],
        columns=DEPTH_COLUMNS,
    )
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
