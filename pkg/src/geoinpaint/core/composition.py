"""
Pixel selection between a reconstruction and an observed image.

Both the occluded training input and the discriminator input are per-pixel
selections driven by a binary mask (1 = occluded), so they share this module.
Selection uses ``where`` rather than arithmetic blending, which keeps
unoccluded pixels bit-identical to their source.
"""

from typing import TYPE_CHECKING, Union

import numpy as np
import torch

from .constants import OCCLUDED_FILL_VALUE
from .exceptions import MaskError, ShapeMismatchError

if TYPE_CHECKING:
    from ..masks.types import OcclusionMask

ArrayMask = Union[np.ndarray, "OcclusionMask"]


def _grid_of(mask: ArrayMask) -> np.ndarray:
    return np.asarray(getattr(mask, "grid", mask))


def _check_tensor_mask(mask: torch.Tensor, reference: torch.Tensor) -> None:
    if mask.dim() != 4 or mask.shape[1] != 1:
        raise ShapeMismatchError(f"Mask must be N x 1 x H x W, got {tuple(mask.shape)}")
    if mask.shape[0] != reference.shape[0] or mask.shape[2:] != reference.shape[2:]:
        raise ShapeMismatchError(
            f"Mask {tuple(mask.shape)} does not match image {tuple(reference.shape)}"
        )
    if not bool(((mask == 0) | (mask == 1)).all()):
        raise MaskError("Mask must be binary")


def compose_occluded(
    clean: Union[np.ndarray, torch.Tensor],
    mask: Union[ArrayMask, torch.Tensor],
    fill: float = OCCLUDED_FILL_VALUE,
) -> Union[np.ndarray, torch.Tensor]:
    """
    Hide the occluded pixels of a clean image.

    Computes ``clean * (1 - M) + fill * M`` as an exact selection.

    Args:
        clean: H x W x C array, or N x C x H x W tensor
        mask: H x W grid / OcclusionMask, or N x 1 x H x W tensor
        fill: Value written into occluded pixels

    Returns:
        Occluded image of the same type, shape and dtype as ``clean``

    Raises:
        ShapeMismatchError: If the mask does not cover the image
    """
    if isinstance(clean, torch.Tensor):
        mask_t = torch.as_tensor(mask, device=clean.device)
        _check_tensor_mask(mask_t, clean)
        return torch.where(mask_t.bool(), torch.full_like(clean, fill), clean)

    grid = _grid_of(mask)
    if clean.shape[:2] != grid.shape:
        raise ShapeMismatchError(f"Mask {grid.shape} does not match image {clean.shape[:2]}")
    hole = grid.astype(bool)
    if clean.ndim == 3:
        hole = hole[..., None]
    return np.where(hole, np.asarray(fill, dtype=clean.dtype), clean).astype(clean.dtype)


def compose_discriminator_input(
    reconstruction: torch.Tensor, observed: torch.Tensor, mask: torch.Tensor
) -> torch.Tensor:
    """
    Keep observed pixels and take reconstructed content only inside the hole.

    ``D_input = R * M + I * (1 - M)``, evaluated per pixel as
    ``R[p] if M[p] == 1 else I[p]``. Gradients reach ``reconstruction`` only
    through occluded pixels.

    Args:
        reconstruction: N x C x H x W reconstructed map
        observed: N x C x H x W occluded input image
        mask: N x 1 x H x W binary mask

    Returns:
        N x C x H x W composed image

    Raises:
        ShapeMismatchError: If shapes disagree
        MaskError: If the mask is not binary
    """
    if reconstruction.shape != observed.shape:
        raise ShapeMismatchError(
            f"Reconstruction {tuple(reconstruction.shape)} and observed image "
            f"{tuple(observed.shape)} differ"
        )
    _check_tensor_mask(mask, observed)
    return torch.where(mask.bool(), reconstruction, observed)
