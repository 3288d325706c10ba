"""
Batch assembly.

Samples are stacked into channel-first tensors: images N x 3 x H x W, masks
N x 1 x H x W and the generator input N x 4 x H x W (occluded RGB + mask).
"""

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
import torch
import torch.nn.functional as F

from .sample import Sample
from ..core.composition import compose_occluded
from ..core.constants import TaskKind
from ..core.exceptions import DataPipelineError


@dataclass
class BatchLabels:
    """Stacked task labels; fields not used by the task stay None."""

    kind: TaskKind
    class_ids: Optional[torch.Tensor] = None
    identities: Optional[torch.Tensor] = None
    satellite: Optional[torch.Tensor] = None
    class_maps: Optional[torch.Tensor] = None

    def to(self, device: torch.device) -> "BatchLabels":
        return BatchLabels(
            kind=self.kind,
            **{
                name: None if value is None else value.to(device)
                for name, value in (
                    ("class_ids", self.class_ids),
                    ("identities", self.identities),
                    ("satellite", self.satellite),
                    ("class_maps", self.class_maps),
                )
            },
        )


@dataclass
class Batch:
    clean: torch.Tensor
    occluded: torch.Tensor
    mask: torch.Tensor
    labels: BatchLabels

    @property
    def generator_input(self) -> torch.Tensor:
        """Occluded image concatenated with the mask channel."""
        return torch.cat([self.occluded, self.mask], dim=1)

    def __len__(self) -> int:
        return int(self.clean.shape[0])

    def to(self, device: torch.device) -> "Batch":
        return replace(
            self,
            clean=self.clean.to(device),
            occluded=self.occluded.to(device),
            mask=self.mask.to(device),
            labels=self.labels.to(device),
        )


def _image_tensor(images: Sequence[np.ndarray], size: int) -> torch.Tensor:
    stacked = torch.from_numpy(np.stack(images).astype(np.float32)).permute(0, 3, 1, 2)
    if stacked.shape[-2:] != (size, size):
        stacked = F.interpolate(stacked, size=(size, size), mode="bilinear", align_corners=False)
    return stacked.contiguous()


def _grid_tensor(grids: Sequence[np.ndarray], size: int) -> torch.Tensor:
    stacked = torch.from_numpy(np.stack(grids)).unsqueeze(1)
    if stacked.shape[-2:] != (size, size):
        stacked = F.interpolate(stacked.float(), size=(size, size), mode="nearest")
    return stacked


def make_batch(samples: Sequence[Sample], size: int) -> Batch:
    """
    Stack samples into a batch at ``size x size``.

    Images are resized bilinearly, masks and class maps with nearest-neighbor;
    masks are re-binarized and the occluded image is recomposed from the
    resized clean image so visible pixels stay exact.

    Args:
        samples: Nonempty list of samples of one task kind
        size: Output side length

    Returns:
        Batch of channel-first float32 tensors

    Raises:
        DataPipelineError: If ``samples`` is empty
    """
    if not samples:
        raise DataPipelineError("Cannot build a batch from an empty sample list")

    clean = _image_tensor([s.clean for s in samples], size)
    mask = (_grid_tensor([s.mask.grid for s in samples], size) > 0).float()
    occluded = compose_occluded(clean, mask)

    kind = samples[0].label.kind
    labels = BatchLabels(kind=kind)
    if kind == TaskKind.GEOLOCATION:
        labels.identities = torch.tensor([s.label.identity for s in samples], dtype=torch.long)
        labels.satellite = _image_tensor([s.label.satellite for s in samples], size)
    elif kind == TaskKind.SEGMENTATION:
        maps = _grid_tensor([s.label.class_map.astype(np.int64) for s in samples], size)
        labels.class_maps = maps.squeeze(1).long()
    else:
        labels.class_ids = torch.tensor([s.label.class_id for s in samples], dtype=torch.long)

    return Batch(clean=clean, occluded=occluded, mask=mask, labels=labels)
