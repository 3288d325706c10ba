"""
Image and mask file I/O.

Images are read as RGB float32 arrays in [0, 1]; masks are single-channel
8-bit PNGs where 255 marks occluded pixels.
"""

from pathlib import Path
from typing import Optional, Tuple

import numpy as np
from PIL import Image

from ..core.constants import MASK_PNG_OCCLUDED, PIXEL_SCALE
from ..core.exceptions import DataPipelineError


def load_rgb(path: Path, size: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """
    Load an RGB image as float32 in [0, 1].

    Args:
        path: PNG or JPEG file
        size: Optional (height, width); resized with a bilinear filter

    Returns:
        H x W x 3 array

    Raises:
        DataPipelineError: If the file cannot be decoded
    """
    try:
        with Image.open(path) as img:
            img = img.convert("RGB")
            if size is not None and img.size != (size[1], size[0]):
                img = img.resize((size[1], size[0]), Image.Resampling.BILINEAR)
            return np.asarray(img, dtype=np.float32) / PIXEL_SCALE
    except OSError as e:
        raise DataPipelineError(f"Cannot read image {path}: {e}") from e


def save_rgb(image: np.ndarray, path: Path) -> None:
    """Write an H x W x 3 [0, 1] array as an 8-bit image."""
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.clip(np.rint(np.clip(image, 0.0, 1.0) * PIXEL_SCALE), 0, 255).astype(np.uint8)
    Image.fromarray(data).save(path)


def load_mask_grid(path: Path, size: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """
    Load a mask PNG as a uint8 {0, 1} grid.

    Any nonzero pixel counts as occluded. Resizing uses nearest-neighbor so the
    grid stays binary.

    Raises:
        DataPipelineError: If the file cannot be decoded
    """
    try:
        with Image.open(path) as img:
            img = img.convert("L")
            if size is not None and img.size != (size[1], size[0]):
                img = img.resize((size[1], size[0]), Image.Resampling.NEAREST)
            return (np.asarray(img) > 0).astype(np.uint8)
    except OSError as e:
        raise DataPipelineError(f"Cannot read mask {path}: {e}") from e


def save_mask_grid(grid: np.ndarray, path: Path) -> None:
    """Write a {0, 1} grid as a PNG with 255 for occluded pixels."""
    path.parent.mkdir(parents=True, exist_ok=True)
    data = (np.asarray(grid) > 0).astype(np.uint8) * MASK_PNG_OCCLUDED
    Image.fromarray(data).save(path)


def load_class_map(path: Path, size: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """
    Load a segmentation label PNG of class ids as int64.

    Raises:
        DataPipelineError: If the file cannot be decoded
    """
    try:
        with Image.open(path) as img:
            if img.mode not in ("L", "P", "I"):
                img = img.convert("L")
            if size is not None and img.size != (size[1], size[0]):
                img = img.resize((size[1], size[0]), Image.Resampling.NEAREST)
            return np.asarray(img).astype(np.int64)
    except OSError as e:
        raise DataPipelineError(f"Cannot read label map {path}: {e}") from e


def resize_grid_nearest(grid: np.ndarray, size: Tuple[int, int]) -> np.ndarray:
    """Nearest-neighbor resize of a 2-D integer grid to (height, width)."""
    if grid.shape == tuple(size):
        return grid
    img = Image.fromarray(grid.astype(np.uint8))
    return np.asarray(img.resize((size[1], size[0]), Image.Resampling.NEAREST)).astype(grid.dtype)
