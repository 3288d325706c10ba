"""
Main CLI application for geoinpaint.

Command-line interface for mask synthesis, training, evaluation and inpainting.
"""

import sys
import traceback
from pathlib import Path
from typing import Optional, Tuple

import click
from tqdm import tqdm

from geoinpaint.config.manager import (
    create_config_template,
    load_config_from_file,
    validate_config,
)
from geoinpaint.config.models import OcclusionSpec, RunConfig
from geoinpaint.core.constants import DEFAULT_IMAGE_SIZE, EvaluationMode
from geoinpaint.core.exceptions import GeoInpaintError
from geoinpaint.core.logging import setup_logging
from geoinpaint.ui.cli.display import print_report, print_report_history, print_training_summary


def _fail(ctx: click.Context, error: Exception) -> None:
    click.secho(f"✗ Error: {error}", fg="red", err=True)
    if ctx.obj.get("verbose"):
        traceback.print_exc()
    sys.exit(1)


def _warn_config_issues(config: RunConfig) -> None:
    for issue in validate_config(config):
        click.secho(f"Warning: {issue}", fg="yellow", err=True)


def _parse_area_range(value: str) -> Tuple[float, float]:
    try:
        lo, hi = (float(part) for part in value.split(","))
    except ValueError:
        raise click.BadParameter(f"expected 'lo,hi', got {value!r}")
    return lo, hi


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output")
@click.option("--log-file", type=click.Path(dir_okay=False), help="Also write logs to this file")
@click.option("--json-logs", is_flag=True, help="Emit logs as JSON lines")
@click.pass_context
def cli(ctx, verbose, log_file, json_logs):
    """
    geoinpaint - Task-driven inpainting of occluded geoscience images.

    Train a coarse-to-fine generator so that a frozen task network performs
    well on the reconstructed images, then evaluate or apply it.
    """
    ctx.ensure_object(dict)
    setup_logging(
        log_file=Path(log_file) if log_file else None,
        verbose=verbose,
        level="INFO" if verbose else "WARNING",
        json_output=json_logs,
    )
    ctx.obj["verbose"] = verbose


@cli.command("synthesize-masks")
@click.option(
    "--seeds",
    required=True,
    type=click.Path(exists=True, file_okay=False),
    help="Seed mask directory",
)
@click.option(
    "--spec", "area", default="0.15,0.60", show_default=True, help="Area ratio range lo,hi"
)
@click.option("--count", "-n", required=True, type=click.IntRange(min=1), help="Number of masks")
@click.option("--out", required=True, type=click.Path(file_okay=False), help="Output directory")
@click.option("--seed", default=0, show_default=True, type=int, help="Random seed")
@click.option(
    "--size", default=DEFAULT_IMAGE_SIZE, show_default=True, type=int, help="Mask side length"
)
@click.pass_context
def synthesize_masks(ctx, seeds, area, count, out, seed, size):
    """
    Place seed masks with random rotation, translation and resizing.

    Example:
        geoinpaint synthesize-masks --seeds clouds/ --spec 0.15,0.60 --count 100 --out masks/
    """
    from geoinpaint.masks.engine import area_ratio, sample_occlusion_mask
    from geoinpaint.masks.pool import load_seed_pool, save_mask
    from geoinpaint.utils.seeding import sample_rng

    try:
        lo, hi = _parse_area_range(area)
        try:
            spec = OcclusionSpec(area_lo=lo, area_hi=hi)
        except ValueError as e:
            raise click.BadParameter(str(e), param_hint="--spec")
        pool = load_seed_pool(Path(seeds))
        out_dir = Path(out)

        ratios = []
        for i in tqdm(range(count), desc="Synthesizing", disable=not ctx.obj["verbose"]):
            mask = sample_occlusion_mask(pool, spec, (size, size), sample_rng(seed, 0, i))
            save_mask(mask, out_dir / f"mask_{i:05d}.png")
            ratios.append(area_ratio(mask))

        click.secho(f"✓ Wrote {count} masks to {out_dir}", fg="green")
        click.echo(f"  Area ratio: min {min(ratios):.3f}, max {max(ratios):.3f}")
    except GeoInpaintError as e:
        _fail(ctx, e)


@cli.command()
@click.option(
    "--config", "-c", "config_path", required=True, type=click.Path(exists=True, dir_okay=False)
)
@click.option(
    "--resume", type=click.Path(exists=True, file_okay=False), help="Checkpoint to resume from"
)
@click.pass_context
def train(ctx, config_path, resume):
    """
    Train the generator and discriminators.

    Example:
        geoinpaint train --config runs/rsscn7.json
    """
    from geoinpaint.core.trainer import Trainer

    try:
        config = load_config_from_file(Path(config_path))
        _warn_config_issues(config)
        click.echo(f"Variant: {config.variant.value} (lambda={config.task_weight})")

        trainer = Trainer(config, show_progress=True)
        try:
            state = trainer.fit(resume_from=Path(resume) if resume else None)
        except KeyboardInterrupt:
            click.echo("\n\nInterrupted by user. Resume from the last checkpoint with --resume.")
            sys.exit(130)

        print_training_summary(state.step, state.running)
        click.secho(f"✓ Checkpoint written to {config.paths.checkpoint_dir}", fg="green")
    except GeoInpaintError as e:
        _fail(ctx, e)


@cli.command()
@click.option("--checkpoint", type=click.Path(file_okay=False), help="Checkpoint directory")
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "-c", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="Run configuration (defaults to the checkpoint's snapshot)")
@click.option("--mode", type=click.Choice([m.value for m in EvaluationMode]), default="inpainted",
              show_default=True)
@click.option(
    "--report-dir", type=click.Path(file_okay=False), help="Where report.json and reports.csv go"
)
@click.option("--device", default="auto", show_default=True)
@click.pass_context
def evaluate(ctx, checkpoint, manifest, config_path, mode, report_dir, device):
    """
    Score the test split of a manifest and write a report.

    Example:
        geoinpaint evaluate --checkpoint checkpoints/ --manifest data/test.jsonl
    """
    from geoinpaint.adapters.factory import build_adapter
    from geoinpaint.core.checkpoint import read_meta
    from geoinpaint.core.constants import CONFIG_SNAPSHOT_FILE
    from geoinpaint.core.evaluator import evaluate as run_evaluation
    from geoinpaint.data.manifest import load_manifest
    from geoinpaint.metrics.report import write_report
    from geoinpaint.utils.determinism import resolve_device

    try:
        eval_mode = EvaluationMode(mode)
        if config_path:
            config = load_config_from_file(Path(config_path))
        elif checkpoint:
            config = load_config_from_file(Path(checkpoint) / CONFIG_SNAPSHOT_FILE)
        else:
            raise click.UsageError("Pass --checkpoint or --config")
        if eval_mode == EvaluationMode.INPAINTED and not checkpoint:
            raise click.UsageError("--mode inpainted needs --checkpoint")

        torch_device = resolve_device(device)
        data = load_manifest(Path(manifest), config.task, config.data.image_size)
        adapter = build_adapter(config.adapter, device=torch_device)
        report = run_evaluation(
            Path(checkpoint) if checkpoint else None,
            data,
            adapter,
            config,
            mode=eval_mode,
            device=torch_device,
            show_progress=True,
        )
        if checkpoint and eval_mode == EvaluationMode.INPAINTED:
            report.step = read_meta(Path(checkpoint)).get("step")

        path = write_report(report, Path(report_dir) if report_dir else config.paths.report_dir)
        print_report(report)
        click.secho(f"\n✓ Report written to {path}", fg="green")
    except GeoInpaintError as e:
        _fail(ctx, e)


@cli.command()
@click.argument("report_dir", type=click.Path(exists=True, file_okay=False))
@click.pass_context
def reports(ctx, report_dir):
    """
    Compare every evaluation appended to a report directory.

    Example:
        geoinpaint reports reports/
    """
    from geoinpaint.core.constants import REPORT_CSV_FILE
    from geoinpaint.metrics.report import read_reports

    try:
        rows = read_reports(Path(report_dir) / REPORT_CSV_FILE)
        if not rows:
            click.echo("No evaluations recorded yet.")
            return
        print_report_history(rows)
    except GeoInpaintError as e:
        _fail(ctx, e)


@cli.command()
@click.option("--checkpoint", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--image", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--mask", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--device", default="auto", show_default=True)
@click.pass_context
def inpaint(ctx, checkpoint, image, mask, out, device):
    """
    Fill the occluded region of one image.

    Example:
        geoinpaint inpaint --checkpoint checkpoints/ --image a.png --mask m.png --out a_filled.png
    """
    from geoinpaint.core.inpainter import Inpainter
    from geoinpaint.utils.determinism import resolve_device

    try:
        inpainter = Inpainter.from_checkpoint(Path(checkpoint), resolve_device(device))
        path = inpainter.inpaint_file(Path(image), Path(mask), Path(out))
        click.secho(f"✓ Wrote {path}", fg="green")
    except GeoInpaintError as e:
        _fail(ctx, e)


@cli.command("train-stub")
@click.option(
    "--config", "-c", "config_path", required=True, type=click.Path(exists=True, dir_okay=False)
)
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Output weights file")
@click.option("--epochs", default=30, show_default=True, type=click.IntRange(min=1))
@click.option("--lr", default=1e-3, show_default=True, type=float)
@click.pass_context
def train_stub(ctx, config_path, out, epochs, lr):
    """
    Fit the stand-in classifier on clean training images.

    Example:
        geoinpaint train-stub --config runs/toy.json --out weights/stub.pt
    """
    from geoinpaint.adapters.stub_training import train_stub_classifier
    from geoinpaint.data.manifest import load_manifest

    try:
        config = load_config_from_file(Path(config_path))
        if config.data.manifest is None:
            raise click.UsageError("The config has no data.manifest")
        data = load_manifest(config.data.manifest, config.task, config.data.image_size)
        accuracy = train_stub_classifier(
            data, config, Path(out), epochs=epochs, learning_rate=lr, show_progress=True
        )
        click.secho(
            f"✓ Stub weights written to {out} (train accuracy {accuracy:.1f}%)", fg="green"
        )
    except GeoInpaintError as e:
        _fail(ctx, e)


@cli.command("init-config")
@click.argument("path", type=click.Path(dir_okay=False))
@click.pass_context
def init_config(ctx, path):
    """Write a configuration template with every default filled in."""
    try:
        create_config_template(Path(path))
        click.secho(f"✓ Wrote {path}", fg="green")
    except GeoInpaintError as e:
        _fail(ctx, e)


@cli.command()
def version():
    """Show version information."""
    from geoinpaint import __version__
    click.echo(f"geoinpaint version {__version__}")


def main(argv: Optional[list] = None):
    """Entry point for CLI application."""
    cli(args=argv, obj={})


if __name__ == "__main__":
    main()
