"""
Sample and task label types.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core.constants import TaskKind
from ..core.exceptions import ShapeMismatchError, ValidationError
from ..masks.types import OcclusionMask


@dataclass(frozen=True)
class TaskLabel:
    """
    Task-specific target.

    classification / test_stub: ``class_id``
    geolocation: ``identity`` plus the clean ``satellite`` view (H x W x 3)
    segmentation: ``class_map`` (H x W int64, 255 = ignore)
    """

    kind: TaskKind
    class_id: Optional[int] = None
    identity: Optional[int] = None
    satellite: Optional[np.ndarray] = None
    class_map: Optional[np.ndarray] = None


@dataclass(frozen=True)
class Sample:
    """
    One (clean, occluded, mask, label) quadruple with H x W x 3 images in [0, 1].

    Raises:
        ShapeMismatchError: If the fields disagree on size
        ValidationError: If occluded and clean differ outside the mask
    """

    clean: np.ndarray
    occluded: np.ndarray
    mask: OcclusionMask
    label: TaskLabel

    def __post_init__(self) -> None:
        if self.clean.shape != self.occluded.shape or self.clean.ndim != 3:
            raise ShapeMismatchError(
                f"Clean {self.clean.shape} and occluded {self.occluded.shape} images differ"
            )
        if self.clean.shape[:2] != self.mask.shape:
            raise ShapeMismatchError(
                f"Mask {self.mask.shape} does not match image {self.clean.shape[:2]}"
            )
        visible = self.mask.grid == 0
        if not np.array_equal(self.clean[visible], self.occluded[visible]):
            raise ValidationError("Occluded image differs from clean image outside the mask")

    @property
    def size(self) -> tuple:
        return self.mask.shape
