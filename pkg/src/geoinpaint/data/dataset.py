"""
Torch datasets over a manifest split.

Samples are addressed by ``(epoch, index)`` and draw all randomness from a
generator keyed by ``(seed, epoch, index)``; batches are addressed by global
step so a resumed run continues the exact same data stream.
"""

from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from torch.utils.data import Dataset, Sampler

from .manifest import DatasetManifest, ManifestRecord
from .sample import Sample, TaskLabel
from ..config.models import RunConfig
from ..core.composition import compose_occluded
from ..core.constants import Split, TaskKind
from ..core.logging import get_logger
from ..masks.engine import maskmix, sample_occlusion_mask
from ..masks.pool import load_mask, load_seed_pool
from ..masks.types import OcclusionMask
from ..utils.imageio import load_class_map, load_rgb
from ..utils.seeding import epoch_permutation, sample_rng

logger = get_logger(__name__)

SampleKey = Union[int, Tuple[int, int]]


class InpaintingDataset(Dataset):
    """
    Samples of one manifest split.

    Test samples always use their pre-baked mask. Train samples use a pre-baked
    mask or place one from their seed pool, and MaskMix is applied on top when
    ``training.maskmix_enabled`` is set.
    """

    def __init__(self, manifest: DatasetManifest, split: Split, config: RunConfig):
        self.manifest = manifest
        self.split = split
        self.config = config
        self.records: List[ManifestRecord] = manifest.split(split)
        self.size = (manifest.image_size, manifest.image_size)
        self.use_maskmix = split == Split.TRAIN and config.training.maskmix_enabled
        self._pools: Dict[Path, List[OcclusionMask]] = {}

    def __len__(self) -> int:
        return len(self.records)

    def _seed_pool(self, directory: Path) -> List[OcclusionMask]:
        if directory not in self._pools:
            self._pools[directory] = load_seed_pool(directory)
        return self._pools[directory]

    def _mask_for(self, record: ManifestRecord, rng: np.random.Generator) -> OcclusionMask:
        if record.mask is not None:
            mask = load_mask(record.mask, self.size)
        else:
            pool = self._seed_pool(record.seed_pool)
            mask = sample_occlusion_mask(pool, self.config.data.occlusion, self.size, rng)

        if self.use_maskmix and mask.occluded_pixels > 0:
            mixed = maskmix(mask, self.config.maskmix, rng)
            if mixed.occluded_pixels > 0:
                mask = mixed
        return mask

    def _label_for(self, record: ManifestRecord) -> TaskLabel:
        task = self.manifest.task
        if task == TaskKind.GEOLOCATION:
            return TaskLabel(
                kind=task,
                identity=record.label.identity,
                satellite=load_rgb(record.label.satellite, self.size),
            )
        if task == TaskKind.SEGMENTATION:
            return TaskLabel(kind=task, class_map=load_class_map(Path(record.label), self.size))
        return TaskLabel(kind=task, class_id=int(record.label))

    def __getitem__(self, key: SampleKey) -> Sample:
        epoch, index = key if isinstance(key, tuple) else (0, key)
        record = self.records[index]
        rng = sample_rng(self.config.training.seed, epoch, index)

        clean = load_rgb(record.image, self.size)
        mask = self._mask_for(record, rng)
        return Sample(
            clean=clean,
            occluded=compose_occluded(clean, mask),
            mask=mask,
            label=self._label_for(record),
        )


class StepBatchSampler(Sampler):
    """
    Batches of ``(epoch, index)`` keys for global steps ``[start_step, max_steps)``.

    Step ``s`` covers stream positions ``s * batch_size`` onwards; position ``p``
    maps to epoch ``p // len`` and index ``perm(epoch)[p % len]``.
    """

    def __init__(
        self,
        dataset_length: int,
        batch_size: int,
        seed: int,
        max_steps: int,
        start_step: int = 0,
    ):
        if dataset_length <= 0:
            raise ValueError("Cannot sample batches from an empty split")
        self.dataset_length = dataset_length
        self.batch_size = batch_size
        self.seed = seed
        self.max_steps = max_steps
        self.start_step = start_step
        self._perms: Dict[int, np.ndarray] = {}

    def _permutation(self, epoch: int) -> np.ndarray:
        if epoch not in self._perms:
            self._perms = {epoch: epoch_permutation(self.seed, epoch, self.dataset_length)}
        return self._perms[epoch]

    def keys_for_step(self, step: int) -> List[Tuple[int, int]]:
        """Sample keys of one global step."""
        keys = []
        for position in range(step * self.batch_size, (step + 1) * self.batch_size):
            epoch, offset = divmod(position, self.dataset_length)
            keys.append((epoch, int(self._permutation(epoch)[offset])))
        return keys

    def __iter__(self) -> Iterator[List[Tuple[int, int]]]:
        for step in range(self.start_step, self.max_steps):
            yield self.keys_for_step(step)

    def __len__(self) -> int:
        return max(0, self.max_steps - self.start_step)


def ordered_keys(length: int) -> Sequence[Tuple[int, int]]:
    """Keys that visit a split once in file order (evaluation)."""
    return [(0, i) for i in range(length)]
