"""
Seed mask pools and mask PNG persistence.
"""

from pathlib import Path
from typing import List, Optional, Tuple

from .types import OcclusionMask
from ..core.constants import IMAGE_EXTENSIONS
from ..core.exceptions import MaskError
from ..core.logging import get_logger
from ..utils.imageio import load_mask_grid, save_mask_grid

logger = get_logger(__name__)


def load_mask(path: Path, size: Optional[Tuple[int, int]] = None) -> OcclusionMask:
    """Load a mask PNG (nonzero = occluded)."""
    return OcclusionMask(load_mask_grid(path, size))


def save_mask(mask: OcclusionMask, path: Path) -> None:
    """Write a mask as an 8-bit PNG with 255 for occluded pixels."""
    save_mask_grid(mask.grid, path)


def load_seed_pool(directory: Path) -> List[OcclusionMask]:
    """
    Load every mask image in a directory, sorted by file name.

    Empty masks are skipped since they cannot be placed or mixed.

    Raises:
        MaskError: If the directory is missing or holds no usable mask
    """
    if not directory.is_dir():
        raise MaskError(f"Seed mask directory not found: {directory}")

    pool = []
    for path in sorted(directory.iterdir()):
        if path.suffix.lower() not in IMAGE_EXTENSIONS:
            continue
        mask = load_mask(path)
        if mask.occluded_pixels == 0:
            logger.warning("empty_seed_mask_skipped", path=str(path))
            continue
        pool.append(mask)

    if not pool:
        raise MaskError(f"No usable seed masks in {directory}")

    logger.debug("seed_pool_loaded", directory=str(directory), count=len(pool))
    return pool
