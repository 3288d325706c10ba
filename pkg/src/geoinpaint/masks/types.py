"""
Occlusion mask data types.
"""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..core.constants import AugmentKind
from ..core.exceptions import MaskError


@dataclass(frozen=True)
class OcclusionMask:
    """
    Binary grid of occluded pixels (1 = occluded, 0 = clear).

    The grid is stored as uint8 and is read-only; masks are shared between
    samples without copying.
    """

    grid: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid)
        if grid.ndim != 2:
            raise MaskError(f"Mask grid must be 2-D, got shape {grid.shape}")
        if grid.size and not np.isin(grid, (0, 1)).all():
            raise MaskError("Mask grid must contain only 0 and 1")
        grid = grid.astype(np.uint8, copy=True)
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)

    @classmethod
    def zeros(cls, height: int, width: int) -> "OcclusionMask":
        """Mask with nothing occluded."""
        return cls(np.zeros((height, width), dtype=np.uint8))

    @property
    def height(self) -> int:
        return int(self.grid.shape[0])

    @property
    def width(self) -> int:
        return int(self.grid.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.height, self.width)

    @property
    def occluded_pixels(self) -> int:
        return int(self.grid.sum(dtype=np.int64))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OcclusionMask):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.grid, other.grid))

    def __hash__(self) -> int:
        return hash((self.shape, self.grid.tobytes()))

    def __repr__(self) -> str:
        return f"OcclusionMask({self.height}x{self.width}, occluded={self.occluded_pixels})"


@dataclass(frozen=True)
class AugmentOp:
    """
    One geometric operation of a MaskMix branch.

    params:
        translate: (dx, dy) in pixels, +dx moves content right, +dy down
        shear: (shear_x, shear_y), unitless
        rotate: (angle,) in degrees, counter-clockwise as displayed
    """

    kind: AugmentKind
    params: Tuple[float, ...]

    def __post_init__(self) -> None:
        expected = 1 if self.kind == AugmentKind.ROTATE else 2
        if len(self.params) != expected:
            raise MaskError(
                f"{self.kind.value} takes {expected} parameter(s), got {self.params}"
            )

    @classmethod
    def translate(cls, dx: float, dy: float) -> "AugmentOp":
        return cls(AugmentKind.TRANSLATE, (float(dx), float(dy)))

    @classmethod
    def shear(cls, shear_x: float, shear_y: float) -> "AugmentOp":
        return cls(AugmentKind.SHEAR, (float(shear_x), float(shear_y)))

    @classmethod
    def rotate(cls, angle: float) -> "AugmentOp":
        return cls(AugmentKind.ROTATE, (float(angle),))

    @classmethod
    def identity(cls) -> "AugmentOp":
        return cls.translate(0.0, 0.0)
