"""
Object-detection scoring: IoU, greedy one-to-one matching, cumulative
precision/recall, interpolated AP, mAP and the IoU-threshold sweep.

Boxes are ``(x, y, w, h)`` with ``(x, y)`` the top-left corner in pixels.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import EmptyClassSetError

logger = logging.getLogger(__name__)

THRESHOLDS: Tuple[float, ...] = tuple(k / 100 for k in range(1, 101))
REPORT_COLUMNS = ["threshold", "class", "AP", "mAP"]


class BBox(BaseModel):
    """Axis-aligned box, top-left corner plus size."""
    model_config = ConfigDict(frozen=True)

    x: float
    y: float
    w: float = Field(..., ge=0)
    h: float = Field(..., ge=0)

    @property
    def corners(self) -> Tuple[float, float, float, float]:
        """``(x1, y1, x2, y2)``"""
        return self.x, self.y, self.x + self.w, self.y + self.h

    @property
    def area(self) -> float:
        x1, y1, x2, y2 = self.corners
        return (x2 - x1) * (y2 - y1)


class Detection(BaseModel):
    """A scored prediction."""
    model_config = ConfigDict(frozen=True)

    image_id: str
    class_label: str
    score: float = Field(..., ge=0.0, le=1.0)
    box: BBox


class GroundTruthBox(BaseModel):
    """An annotated object."""
    model_config = ConfigDict(frozen=True)

    image_id: str
    class_label: str
    box: BBox


class Label(str, Enum):
    TP = "TP"
    FP = "FP"


class MatchedDetection(BaseModel):
    model_config = ConfigDict(frozen=True)

    detection: Detection
    label: Label


class PRPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    recall: float = Field(..., ge=0.0, le=1.0)
    precision: float = Field(..., ge=0.0, le=1.0)


class Interpolation(str, Enum):
    """How precision is sampled along recall."""
    ALL_POINT = "all-point"
    ELEVEN_POINT = "11-point"


class EvalReport(BaseModel):
    """Per-class AP and mAP at every IoU threshold."""
    model_config = ConfigDict(frozen=True)

    thresholds: Tuple[float, ...] = Field(default=THRESHOLDS)
    classes: Tuple[str, ...] = Field(..., description="Ground-truth classes, sorted")
    ap: Dict[str, Tuple[float, ...]] = Field(..., description="class -> AP aligned with thresholds")
    mean_ap: Tuple[float, ...] = Field(..., description="mAP aligned with thresholds")

    def to_frame(self) -> pd.DataFrame:
        """Long table: one row per (threshold, class), mAP repeated per threshold."""
        rows = [
            (threshold, label, self.ap[label][i], self.mean_ap[i])
            for i, threshold in enumerate(self.thresholds)
            for label in self.classes
        ]
        return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union; 0 when the union is empty."""
    ax1, ay1, ax2, ay2 = a.corners
    bx1, by1, bx2, by2 = b.corners
    iw = max(0.0, min(ax2, bx2) - max(ax1, bx1))
    ih = max(0.0, min(ay2, by2) - max(ay1, by1))
    inter = iw * ih
    union = (ax2 - ax1) * (ay2 - ay1) + (bx2 - bx1) * (by2 - by1) - inter
    if union <= 0:
        return 0.0
    return inter / union


def iou_matrix(boxes_a: np.ndarray, boxes_b: np.ndarray) -> np.ndarray:
    """
    Pairwise IoU of two ``(n, 4)`` arrays of ``x, y, w, h`` rows.

    Returns:
        ``(len(boxes_a), len(boxes_b))`` matrix
    """
    # areas from the same corners as the intersection, so iou(a, a) is exactly 1
    a = _to_corners(boxes_a)[:, None, :]
    b = _to_corners(boxes_b)[None, :, :]
    iw = np.maximum(0.0, np.minimum(a[..., 2], b[..., 2]) - np.maximum(a[..., 0], b[..., 0]))
    ih = np.maximum(0.0, np.minimum(a[..., 3], b[..., 3]) - np.maximum(a[..., 1], b[..., 1]))
    inter = iw * ih
    area_a = (a[..., 2] - a[..., 0]) * (a[..., 3] - a[..., 1])
    area_b = (b[..., 2] - b[..., 0]) * (b[..., 3] - b[..., 1])
    union = area_a + area_b - inter
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(union > 0, inter / np.where(union > 0, union, 1.0), 0.0)


def _to_corners(boxes: np.ndarray) -> np.ndarray:
    boxes = np.asarray(boxes, dtype=np.float64).reshape(-1, 4)
    return np.column_stack((boxes[:, 0], boxes[:, 1], boxes[:, 0] + boxes[:, 2], boxes[:, 1] + boxes[:, 3]))


def _ranked(detections: Sequence[Detection]) -> List[Detection]:
    # descending score, then image id, then input order (sort is stable)
    return sorted(detections, key=lambda d: (-d.score, d.image_id))


class _ClassMatcher:
    """
    Precomputed overlaps for one class so the sweep only reruns the greedy pass.
    """

    def __init__(self, detections: Sequence[Detection], ground_truth: Sequence[GroundTruthBox]):
        self.detections = _ranked(detections)
        self.gt_count = len(ground_truth)

        by_image: Dict[str, List[GroundTruthBox]] = {}
        for gt in ground_truth:
            by_image.setdefault(gt.image_id, []).append(gt)
        gt_boxes = {
            image: np.array([[g.box.x, g.box.y, g.box.w, g.box.h] for g in gts], dtype=float)
            for image, gts in by_image.items()
        }

        # overlaps[k]: IoU of the k-th ranked detection with each GT of its image
        self.overlaps: List[np.ndarray] = []
        for det in self.detections:
            boxes = gt_boxes.get(det.image_id)
            if boxes is None:
                self.overlaps.append(np.zeros(0))
            else:
                own = np.array([[det.box.x, det.box.y, det.box.w, det.box.h]], dtype=float)
                self.overlaps.append(iou_matrix(own, boxes)[0])

    def labels(self, threshold: float) -> List[Label]:
        consumed: Dict[str, np.ndarray] = {}
        result: List[Label] = []
        for det, overlaps in zip(self.detections, self.overlaps):
            if overlaps.size == 0:
                result.append(Label.FP)
                continue
            used = consumed.setdefault(det.image_id, np.zeros(overlaps.size, dtype=bool))
            candidates = np.where(used, -1.0, overlaps)
            best = int(np.argmax(candidates))
            if not used[best] and candidates[best] >= threshold:
                used[best] = True
                result.append(Label.TP)
            else:
                result.append(Label.FP)
        return result


def match_detections(
    detections: Sequence[Detection],
    ground_truth: Sequence[GroundTruthBox],
    threshold: float,
) -> List[MatchedDetection]:
    """
    Label detections of one class as true or false positives.

    Detections are visited by descending score (ties: image id, then input
    order). Each takes the unmatched ground-truth box of its image with the
    highest IoU; it is a TP, consuming that box, when the IoU reaches
    ``threshold``, otherwise an FP.

    Returns:
        Detections in visiting order with their labels
    """
    matcher = _ClassMatcher(detections, ground_truth)
    return [
        MatchedDetection(detection=det, label=label)
        for det, label in zip(matcher.detections, matcher.labels(threshold))
    ]


def pr_curve(labels: Sequence[Label], gt_count: int) -> List[PRPoint]:
    """
    Cumulative precision and recall after each ranked detection.

    Returns:
        One point per label; empty when ``gt_count`` is 0
    """
    if gt_count <= 0 or not labels:
        return []
    hits = np.array([label == Label.TP for label in labels], dtype=float)
    ctp = np.cumsum(hits)
    cfp = np.cumsum(1.0 - hits)
    recall = ctp / gt_count
    precision = ctp / (ctp + cfp)
    return [PRPoint(recall=float(r), precision=float(p)) for r, p in zip(recall, precision)]


def average_precision(points: Sequence[PRPoint], interpolation: Interpolation = Interpolation.ALL_POINT) -> float:
    """
    Interpolated area under the precision/recall curve.

    ALL_POINT sums, over the distinct recall levels prefixed with 0, the
    recall step times the best precision reached at or beyond the step's end.
    ELEVEN_POINT averages the best precision at recall >= 0, 0.1, ..., 1.
    """
    if not points:
        return 0.0
    recall = np.array([p.recall for p in points], dtype=float)
    precision = np.array([p.precision for p in points], dtype=float)
    order = np.argsort(recall, kind="stable")
    recall, precision = recall[order], precision[order]
    # precision ladder: best precision at this recall or later
    ladder = np.maximum.accumulate(precision[::-1])[::-1]

    def best_from(level: float) -> float:
        index = int(np.searchsorted(recall, level, side="left"))
        return float(ladder[index]) if index < recall.size else 0.0

    if interpolation == Interpolation.ELEVEN_POINT:
        return float(sum(best_from(k / 10) for k in range(11)) / 11)

    levels = np.unique(np.concatenate(([0.0], recall)))
    ap = sum((hi - lo) * best_from(hi) for lo, hi in zip(levels[:-1], levels[1:]))
    return float(min(1.0, max(0.0, ap)))


def map_score(aps: Mapping[str, float]) -> float:
    """Mean of the per-class APs."""
    if not aps:
        raise EmptyClassSetError("mAP needs at least one class")
    return float(np.mean(list(aps.values())))


def _split_by_class(
    detections: Iterable[Detection], ground_truth: Iterable[GroundTruthBox]
) -> Tuple[Dict[str, List[Detection]], Dict[str, List[GroundTruthBox]]]:
    dets: Dict[str, List[Detection]] = {}
    gts: Dict[str, List[GroundTruthBox]] = {}
    for det in detections:
        dets.setdefault(det.class_label, []).append(det)
    for gt in ground_truth:
        gts.setdefault(gt.class_label, []).append(gt)
    return dets, gts


def threshold_sweep(
    detections: Sequence[Detection],
    ground_truth: Sequence[GroundTruthBox],
    thresholds: Sequence[float] = THRESHOLDS,
    interpolation: Interpolation = Interpolation.ALL_POINT,
    workers: int = 1,
) -> EvalReport:
    """
    AP per ground-truth class and mAP at every IoU threshold.

    Classes come from the ground truth; detections of classes without ground
    truth are ignored. With ``workers > 1`` thresholds are evaluated on a
    thread pool and merged back in threshold order.

    Raises:
        EmptyClassSetError: no ground-truth boxes at all
    """
    dets_by_class, gts_by_class = _split_by_class(detections, ground_truth)
    classes = tuple(sorted(gts_by_class))
    if not classes:
        raise EmptyClassSetError("ground truth contains no classes")
    skipped = sorted(set(dets_by_class) - set(gts_by_class))
    if skipped:
        logger.warning(f"Ignoring detections of classes without ground truth: {', '.join(skipped)}")

    matchers = {c: _ClassMatcher(dets_by_class.get(c, []), gts_by_class[c]) for c in classes}

    def evaluate(threshold: float) -> Dict[str, float]:
        return {
            c: average_precision(pr_curve(m.labels(threshold), m.gt_count), interpolation)
            for c, m in matchers.items()
        }

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_threshold = list(pool.map(evaluate, thresholds))
    else:
        per_threshold = [evaluate(t) for t in thresholds]

    report = EvalReport(
        thresholds=tuple(thresholds),
        classes=classes,
        ap={c: tuple(row[c] for row in per_threshold) for c in classes},
        mean_ap=tuple(map_score(row) for row in per_threshold),
    )
    logger.info(f"Sweep finished: {len(classes)} class(es) x {len(thresholds)} threshold(s)")
    return report
