"""AP / mAP against IoU threshold, one line per class."""

import logging
from pathlib import Path
from typing import Union

from .detection import EvalReport

logger = logging.getLogger(__name__)


def plot_report(report: EvalReport, path: Union[str, Path]) -> None:
    """Draw the sweep to an image file (format from the suffix)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 5))
    try:
        for label in report.classes:
            ax.plot(report.thresholds, report.ap[label], label=label, linewidth=1.2)
        ax.plot(report.thresholds, report.mean_ap, label="mAP", color="black", linewidth=2.0, linestyle="--")
        ax.set_xlabel("IoU threshold")
        ax.set_ylabel("AP")
        ax.set_xlim(0.0, 1.0)
        ax.set_ylim(0.0, 1.05)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="lower left")
        fig.tight_layout()
        fig.savefig(path)
    finally:
        plt.close(fig)
    logger.info(f"Wrote sweep plot to {path}")
