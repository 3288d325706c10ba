"""
Terminal display of evaluation reports and run summaries.
"""

import math
from typing import Dict, List, Optional

import click

from geoinpaint.metrics.report import MetricReport

IMAGE_ROWS = [
    ("PSNR (dB)", "psnr"),
    ("SSIM", "ssim"),
    ("PSNR hole (dB)", "psnr_hole"),
    ("PSNR coarse (dB)", "psnr_coarse"),
    ("SSIM coarse", "ssim_coarse"),
]

TASK_LABELS = {
    "accuracy": "Accuracy (%)",
    "recall@1": "R@1 (%)",
    "recall@5": "R@5 (%)",
    "recall@10": "R@10 (%)",
    "recall@top1%": "R@top1% (%)",
    "ap": "AP (%)",
    "miou": "mIoU",
}

TEXT_COLUMNS = [("mode", "Mode"), ("variant", "Variant"), ("step", "Step")]


def format_metric(value: Optional[float]) -> str:
    """
    Format a metric value for display.

    Args:
        value: Metric value, possibly None or infinite

    Returns:
        Formatted string like "24.0484", "inf" or "-"
    """
    if value is None:
        return "-"
    if math.isinf(value):
        return "inf"
    return f"{value:.4f}"


def print_report(report: MetricReport) -> None:
    """Print a report as an aligned two-column table."""
    rows = [
        ("Mode", report.mode.value),
        ("Task", report.task.value),
        ("Samples", str(report.sample_count)),
    ]
    if report.variant:
        rows.append(("Variant", report.variant))
    for label, name in IMAGE_ROWS:
        value = getattr(report, name)
        if value is not None:
            rows.append((label, format_metric(value)))
    if report.psnr_infinite:
        rows.append(("Exact reconstructions", str(report.psnr_infinite)))
    for name, value in report.task_metrics.items():
        rows.append((TASK_LABELS.get(name, name), format_metric(value)))

    width = max(len(label) for label, _ in rows)
    click.echo("")
    for label, value in rows:
        click.echo(f"  {label:<{width}}  {value}")


def print_report_history(rows: List[Dict[str, str]]) -> None:
    """
    Print one line per recorded evaluation.

    Task metric columns appear only when some row has a value for them.
    """
    metric_columns = [("psnr", "PSNR (dB)"), ("ssim", "SSIM")] + [
        (name, label) for name, label in TASK_LABELS.items() if any(row.get(name) for row in rows)
    ]
    columns = TEXT_COLUMNS + metric_columns
    table = [[label for _, label in columns]]
    for row in rows:
        cells = [row.get(name) or "-" for name, _ in TEXT_COLUMNS]
        cells += [
            format_metric(float(row[name])) if row.get(name) else "-" for name, _ in metric_columns
        ]
        table.append(cells)

    widths = [max(len(line[i]) for line in table) for i in range(len(columns))]
    click.echo("")
    for line in table:
        click.echo("  " + "  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip())


def print_training_summary(step: int, running: dict) -> None:
    """Print the running loss averages at the end of training."""
    click.echo(f"\nStep {step}")
    for name in ("l1_refined", "perceptual_refined", "gan_generator", "task", "total"):
        if name in running:
            click.echo(f"  {name}: {running[name]:.4f}")
