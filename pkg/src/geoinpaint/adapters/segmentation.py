"""
Semantic segmentation adapter.
"""

import torch
import torch.nn.functional as F

from .base import TaskAdapter
from .networks import segmentation_logits, upsample_logits
from ..core.constants import TaskKind
from ..core.exceptions import ShapeMismatchError, TaskLabelError
from ..data.batch import BatchLabels


class SegmentationAdapter(TaskAdapter):
    """Per-pixel cross-entropy with an ignore index."""

    kinds = (TaskKind.SEGMENTATION,)

    @property
    def num_classes(self) -> int:
        return int(self.config.num_classes)

    def logits(self, image: torch.Tensor) -> torch.Tensor:
        """N x classes x H x W logits at the image resolution."""
        out = segmentation_logits(self.network(self.normalize(image)))
        return upsample_logits(out, image.shape[-2:])

    def check_labels(self, class_maps: torch.Tensor, image: torch.Tensor) -> None:
        if class_maps is None:
            raise TaskLabelError("Segmentation needs class maps")
        expected = (image.shape[0], *image.shape[-2:])
        if tuple(class_maps.shape) != expected:
            raise ShapeMismatchError(
                f"Class maps {tuple(class_maps.shape)} do not match images {expected}"
            )
        valid = class_maps[class_maps != self.config.ignore_index]
        if valid.numel() and (int(valid.min()) < 0 or int(valid.max()) >= self.num_classes):
            raise TaskLabelError(f"Class ids must lie in [0, {self.num_classes}) or be ignored")

    def loss(self, image: torch.Tensor, labels: BatchLabels) -> torch.Tensor:
        self.check_labels(labels.class_maps, image)
        return F.cross_entropy(
            self.logits(image),
            labels.class_maps.to(image.device),
            ignore_index=self.config.ignore_index,
        )

    @torch.no_grad()
    def predict(self, image: torch.Tensor) -> torch.Tensor:
        return self.logits(image).argmax(dim=1)


def segmentation_loss(
    adapter: SegmentationAdapter, image: torch.Tensor, class_maps: torch.Tensor
) -> torch.Tensor:
    """Mean per-pixel cross-entropy skipping ignore-index pixels."""
    return adapter.loss(image, BatchLabels(kind=adapter.kind, class_maps=class_maps))
