"""
Evaluation: detection accuracy sweeps, depth estimation and throughput
confidence intervals.
"""

from .depth import (
    DepthEstimate,
    DepthImage,
    Region,
    estimate_depth,
    estimate_depths,
    load_depth_image,
)
from .detection import (
    THRESHOLDS,
    BBox,
    Detection,
    EvalReport,
    GroundTruthBox,
    Interpolation,
    Label,
    MatchedDetection,
    PRPoint,
    average_precision,
    iou,
    iou_matrix,
    map_score,
    match_detections,
    pr_curve,
    threshold_sweep,
)
from .io import (
    load_detections,
    load_ground_truth,
    load_samples,
    write_depth_estimates,
    write_report,
)
from .plot import plot_report
from .stats import Z_TABLE, ConfidenceInterval, SampleSet, confidence_interval, z_value

__all__ = [
    "BBox",
    "Detection",
    "GroundTruthBox",
    "Label",
    "MatchedDetection",
    "PRPoint",
    "Interpolation",
    "EvalReport",
    "THRESHOLDS",
    "iou",
    "iou_matrix",
    "match_detections",
    "pr_curve",
    "average_precision",
    "map_score",
    "threshold_sweep",
    "DepthImage",
    "Region",
    "DepthEstimate",
    "load_depth_image",
    "estimate_depth",
    "estimate_depths",
    "SampleSet",
    "ConfidenceInterval",
    "Z_TABLE",
    "z_value",
    "confidence_interval",
    "load_detections",
    "load_ground_truth",
    "load_samples",
    "write_report",
    "write_depth_estimates",
    "plot_report",
]
