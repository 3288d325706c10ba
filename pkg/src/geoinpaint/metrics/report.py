"""
Evaluation reports: pretty JSON plus one CSV row per run.
"""

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from ..core.constants import REPORT_CSV_FILE, REPORT_JSON_FILE, EvaluationMode, TaskKind
from ..core.exceptions import MetricError
from ..core.logging import get_logger

logger = get_logger(__name__)

TASK_METRIC_NAMES = [
    "accuracy",
    "recall@1",
    "recall@5",
    "recall@10",
    "recall@top1%",
    "ap",
    "miou",
]

CSV_FIELDS = [
    "mode",
    "task",
    "variant",
    "step",
    "sample_count",
    "psnr",
    "ssim",
    "psnr_hole",
    "psnr_coarse",
    "ssim_coarse",
    "psnr_infinite",
    *TASK_METRIC_NAMES,
]


@dataclass
class MetricReport:
    """
    Metrics of one evaluation run.

    Image metrics are None in ``clean`` mode. PSNR means are taken over images
    with a finite PSNR; ``psnr_infinite`` counts the exact reconstructions left
    out. A mean is ``inf`` only when every image was exact, and is written as
    null. Accuracy, recall and AP are percentages and mIoU is a fraction.
    """

    mode: EvaluationMode
    task: TaskKind
    sample_count: int
    psnr: Optional[float] = None
    ssim: Optional[float] = None
    psnr_hole: Optional[float] = None
    psnr_coarse: Optional[float] = None
    ssim_coarse: Optional[float] = None
    psnr_infinite: int = 0
    task_metrics: Dict[str, float] = field(default_factory=dict)
    variant: Optional[str] = None
    step: Optional[int] = None

    def __post_init__(self) -> None:
        if self.sample_count <= 0:
            raise MetricError("A report needs at least one sample")
        for name in ("ssim", "ssim_coarse"):
            value = getattr(self, name)
            if value is not None and not -1.0 - 1e-9 <= value <= 1.0 + 1e-9:
                raise MetricError(f"{name} out of range: {value}")
        for name, value in self.task_metrics.items():
            upper = 1.0 if name == "miou" else 100.0
            if not 0.0 <= value <= upper + 1e-9:
                raise MetricError(f"{name} out of range: {value}")

    def to_dict(self) -> Dict[str, Any]:
        """Plain dict with non-finite floats mapped to None."""
        data = asdict(self)
        data["mode"] = self.mode.value
        data["task"] = self.task.value
        for name, value in data.items():
            if isinstance(value, float):
                data[name] = finite_or_none(value)
        data["task_metrics"] = {k: finite_or_none(v) for k, v in self.task_metrics.items()}
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False)

    def csv_row(self) -> Dict[str, Any]:
        """Flat row keyed by CSV_FIELDS; missing metrics are empty strings."""
        flat = self.to_dict()
        metrics = flat.pop("task_metrics")
        row = {}
        for name in CSV_FIELDS:
            value = metrics.get(name, flat.get(name))
            row[name] = "" if value is None else value
        return row


def write_report(report: MetricReport, report_dir: Path) -> Path:
    """
    Write ``report.json`` and append a row to ``reports.csv``.

    Returns:
        Path of the JSON report
    """
    report_dir.mkdir(parents=True, exist_ok=True)
    json_path = report_dir / REPORT_JSON_FILE
    json_path.write_text(report.to_json() + "\n", encoding="utf-8")

    csv_path = report_dir / REPORT_CSV_FILE
    new_file = not csv_path.exists()
    with open(csv_path, "a", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_FIELDS)
        if new_file:
            writer.writeheader()
        writer.writerow(report.csv_row())

    logger.info("report_written", path=str(json_path), csv=str(csv_path))
    return json_path


def read_reports(csv_path: Path) -> List[Dict[str, str]]:
    """
    Rows previously appended to a reports CSV, oldest first.

    Raises:
        MetricError: If the file does not exist
    """
    if not Path(csv_path).is_file():
        raise MetricError(f"No evaluation reports at {csv_path}")
    with open(csv_path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def finite_or_none(value: Optional[float]) -> Optional[float]:
    """NaN (hole PSNR with no hole) and infinities become None."""
    return None if value is None or not math.isfinite(value) else value


def finite_mean(values: Iterable[Optional[float]]) -> Tuple[Optional[float], int]:
    """
    Mean over finite values.

    NaN and None are dropped. Infinite values (exact reconstructions) are
    dropped and counted; when nothing finite is left the mean is ``inf``.

    Returns:
        (mean or None when there are no values, number of infinite values)
    """
    finite, infinite = [], []
    for v in values:
        if v is None or math.isnan(v):
            continue
        (infinite if math.isinf(v) else finite).append(v)
    if finite:
        return float(np.mean(finite)), len(infinite)
    if infinite:
        return math.inf, len(infinite)
    return None, 0
