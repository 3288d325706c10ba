"""
Evaluation metrics and reports.
"""

from geoinpaint.metrics.image_quality import psnr, psnr_hole, ssim
from geoinpaint.metrics.task import (
    TOP_ONE_PERCENT,
    accuracy,
    average_precision,
    confusion_matrix,
    cosine_similarity,
    miou,
    miou_from_confusion,
    recall_at_k,
    resolve_k,
    retrieval_average_precision,
    true_match_ranks,
)
from geoinpaint.metrics.report import (
    CSV_FIELDS,
    MetricReport,
    finite_mean,
    finite_or_none,
    read_reports,
    write_report,
)

__all__ = [
    "psnr",
    "psnr_hole",
    "ssim",
    "TOP_ONE_PERCENT",
    "accuracy",
    "average_precision",
    "confusion_matrix",
    "cosine_similarity",
    "miou",
    "miou_from_confusion",
    "recall_at_k",
    "resolve_k",
    "retrieval_average_precision",
    "true_match_ranks",
    "CSV_FIELDS",
    "MetricReport",
    "finite_mean",
    "finite_or_none",
    "read_reports",
    "write_report",
]
