"""
Evaluation over the test split.

Modes:
    inpainted: composed generator reconstruction (default)
    occluded:  the occluded input itself as the "reconstruction"
    clean:     clean images through the task network only, no image metrics
"""

from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import torch
from tqdm import tqdm

from .checkpoint import load_generator
from .constants import EvaluationMode, Split, TaskKind
from .exceptions import CheckpointError, MetricError
from .inpainter import reconstruct
from .logging import get_logger
from .state import TrainState
from ..adapters.base import TaskAdapter
from ..config.models import RunConfig
from ..data.batch import make_batch
from ..data.dataset import InpaintingDataset, ordered_keys
from ..data.manifest import DatasetManifest
from ..metrics.image_quality import psnr, psnr_hole, ssim
from ..metrics.report import MetricReport, finite_mean
from ..metrics.task import (
    TOP_ONE_PERCENT,
    accuracy,
    confusion_matrix,
    miou_from_confusion,
    recall_at_k,
    retrieval_average_precision,
)
from ..models.generator import CoarseToFineGenerator

logger = get_logger(__name__)

GeneratorSource = Union[TrainState, CoarseToFineGenerator, Path, str, None]

RECALL_CUTOFFS = (1, 5, 10, TOP_ONE_PERCENT)


def _resolve_generator(
    source: GeneratorSource, device: torch.device
) -> Optional[CoarseToFineGenerator]:
    if source is None:
        return None
    if isinstance(source, TrainState):
        return source.generator
    if isinstance(source, CoarseToFineGenerator):
        return source
    path = Path(source)
    if not path.exists():
        raise CheckpointError(f"Checkpoint not found: {path}")
    generator, _, _ = load_generator(path, device)
    return generator


def _to_hwc(images: torch.Tensor) -> List[np.ndarray]:
    return [img.permute(1, 2, 0).cpu().numpy().astype(np.float64) for img in images]


class _TaskAccumulator:
    """Order-independent sums for the task metric of one kind."""

    def __init__(self, adapter: TaskAdapter):
        self.adapter = adapter
        self.predictions: List[int] = []
        self.labels: List[int] = []
        self.confusion: Optional[np.ndarray] = None
        self.queries: List[np.ndarray] = []
        self.gallery: List[np.ndarray] = []

    def add(self, images: torch.Tensor, batch) -> None:
        kind = self.adapter.kind
        labels = batch.labels
        if kind == TaskKind.GEOLOCATION:
            self.queries.append(self.adapter.embed(images, "street").cpu().numpy())
            self.gallery.append(self.adapter.embed(labels.satellite, "satellite").cpu().numpy())
        elif kind == TaskKind.SEGMENTATION:
            pred = self.adapter.predict(images).cpu().numpy()
            conf = confusion_matrix(
                pred,
                labels.class_maps.cpu().numpy(),
                self.adapter.num_classes,
                self.adapter.config.ignore_index,
            )
            self.confusion = conf if self.confusion is None else self.confusion + conf
        else:
            self.predictions.extend(self.adapter.predict(images).cpu().tolist())
            self.labels.extend(labels.class_ids.cpu().tolist())

    def result(self) -> Dict[str, float]:
        kind = self.adapter.kind
        if kind == TaskKind.GEOLOCATION:
            queries = np.concatenate(self.queries)
            gallery = np.concatenate(self.gallery)
            truth = list(range(len(queries)))
            metrics = {
                f"recall@{k}": recall_at_k(queries, gallery, truth, k) for k in RECALL_CUTOFFS
            }
            metrics["ap"] = retrieval_average_precision(queries, gallery, truth)
            return metrics
        if kind == TaskKind.SEGMENTATION:
            return {"miou": miou_from_confusion(self.confusion)}
        return {"accuracy": accuracy(self.predictions, self.labels)}


@torch.no_grad()
def evaluate(
    source: GeneratorSource,
    manifest: DatasetManifest,
    adapter: Optional[TaskAdapter],
    config: RunConfig,
    mode: EvaluationMode = EvaluationMode.INPAINTED,
    device: Optional[torch.device] = None,
    show_progress: bool = False,
) -> MetricReport:
    """
    Score the test split.

    Args:
        source: TrainState, generator or checkpoint directory (unused unless ``inpainted``)
        manifest: Manifest whose test records carry pre-baked masks
        adapter: Frozen task adapter; task metrics are skipped when None
        config: Run configuration
        mode: What is scored
        device: Evaluation device
        show_progress: Display a tqdm bar

    Returns:
        MetricReport

    Raises:
        CheckpointError: If ``inpainted`` mode has no usable generator
        MetricError: If the split is empty or ``clean`` mode has no adapter
    """
    device = device or torch.device("cpu")
    generator = None
    if mode == EvaluationMode.INPAINTED:
        generator = _resolve_generator(source, device)
        if generator is None:
            raise CheckpointError("Inpainted evaluation needs a generator or checkpoint")
        was_training = generator.training
        generator.to(device).eval()
    if mode == EvaluationMode.CLEAN and adapter is None:
        raise MetricError("Clean evaluation scores the task network and needs an adapter")

    dataset = InpaintingDataset(manifest, Split.TEST, config)
    if len(dataset) == 0:
        raise MetricError(f"No test records in {manifest.path}")
    keys = ordered_keys(len(dataset))
    batch_size = config.data.batch_size

    psnrs, ssims, holes, psnrs_coarse, ssims_coarse = [], [], [], [], []
    task = _TaskAccumulator(adapter) if adapter is not None else None

    starts = range(0, len(keys), batch_size)
    for start in tqdm(starts, desc="Evaluating", disable=not show_progress):
        samples = [dataset[key] for key in keys[start:start + batch_size]]
        batch = make_batch(samples, manifest.image_size).to(device)

        coarse = None
        if mode == EvaluationMode.INPAINTED:
            images, coarse = reconstruct(generator, batch.occluded, batch.mask)
        elif mode == EvaluationMode.OCCLUDED:
            images = batch.occluded
        else:
            images = batch.clean

        if mode != EvaluationMode.CLEAN:
            clean = _to_hwc(batch.clean)
            masks = batch.mask[:, 0].cpu().numpy()
            for rec, ref, grid in zip(_to_hwc(images), clean, masks):
                psnrs.append(psnr(rec, ref))
                ssims.append(ssim(rec, ref))
                holes.append(psnr_hole(rec, ref, grid))
            if coarse is not None:
                for rec, ref in zip(_to_hwc(coarse), clean):
                    psnrs_coarse.append(psnr(rec, ref))
                    ssims_coarse.append(ssim(rec, ref))

        if task is not None:
            task.add(images, batch)

    if generator is not None and was_training:
        generator.train()

    mean_psnr, infinite = finite_mean(psnrs)
    if infinite:
        logger.info("exact_reconstructions_excluded", count=infinite, metric="psnr")
    report = MetricReport(
        mode=mode,
        task=manifest.task,
        sample_count=len(dataset),
        psnr=mean_psnr,
        ssim=finite_mean(ssims)[0],
        psnr_hole=finite_mean(holes)[0],
        psnr_coarse=finite_mean(psnrs_coarse)[0],
        ssim_coarse=finite_mean(ssims_coarse)[0],
        psnr_infinite=infinite,
        task_metrics=task.result() if task is not None else {},
        variant=config.variant.value,
    )
    logger.info(
        "evaluation_finished", mode=mode.value, samples=report.sample_count, psnr=report.psnr
    )
    return report
