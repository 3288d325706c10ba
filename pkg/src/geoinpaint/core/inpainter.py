"""
Inference: fill the occluded region of an image with a trained generator.

The task adapter is never loaded here.
"""

from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import torch

from .checkpoint import load_generator
from .composition import compose_discriminator_input, compose_occluded
from .exceptions import ShapeMismatchError
from .logging import get_logger
from ..masks.types import OcclusionMask
from ..models.encoder_decoder import check_spatial_size
from ..models.generator import CoarseToFineGenerator
from ..utils.imageio import load_mask_grid, load_rgb, save_rgb

logger = get_logger(__name__)


@torch.no_grad()
def reconstruct(
    generator: CoarseToFineGenerator, occluded: torch.Tensor, mask: torch.Tensor
) -> Tuple[torch.Tensor, torch.Tensor]:
    """
    Composed refined and coarse reconstructions, clamped to [0, 1].

    Args:
        generator: Generator in eval mode
        occluded: N x 3 x H x W occluded images
        mask: N x 1 x H x W binary masks

    Returns:
        (refined, coarse) with observed pixels copied from ``occluded``
    """
    out = generator(torch.cat([occluded, mask], dim=1), mask)
    refined = compose_discriminator_input(out.refined.clamp(0.0, 1.0), occluded, mask)
    coarse = compose_discriminator_input(out.coarse.clamp(0.0, 1.0), occluded, mask)
    return refined, coarse


class Inpainter:
    """Generator-only inference on numpy H x W x 3 images."""

    def __init__(self, generator: CoarseToFineGenerator, device: Optional[torch.device] = None):
        self.device = device or torch.device("cpu")
        self.generator = generator.to(self.device).eval()

    @classmethod
    def from_checkpoint(cls, directory: Path, device: Optional[torch.device] = None) -> "Inpainter":
        generator, _, meta = load_generator(directory, device)
        logger.info("inpainter_ready", checkpoint=str(directory), step=meta.get("step"))
        return cls(generator, device)

    def inpaint(self, image: np.ndarray, mask: Union[OcclusionMask, np.ndarray]) -> np.ndarray:
        """
        Reconstruct the occluded pixels of ``image``.

        Args:
            image: H x W x 3 float array in [0, 1]
            mask: H x W binary mask (1 = occluded)

        Returns:
            H x W x 3 float32 array in [0, 1]; pixels outside the mask equal ``image``

        Raises:
            ShapeMismatchError: If H or W is not divisible by 32 or the mask size differs
        """
        mask = mask if isinstance(mask, OcclusionMask) else OcclusionMask(np.asarray(mask))
        image = np.asarray(image, dtype=np.float32)
        if image.ndim != 3 or image.shape[:2] != mask.shape:
            raise ShapeMismatchError(f"Mask {mask.shape} does not match image {image.shape}")
        check_spatial_size(*mask.shape)

        occluded = compose_occluded(image, mask)
        occluded_t = torch.from_numpy(occluded).permute(2, 0, 1).unsqueeze(0).to(self.device)
        mask_t = torch.from_numpy(mask.grid.astype(np.float32))[None, None].to(self.device)
        refined, _ = reconstruct(self.generator, occluded_t, mask_t)
        return refined[0].permute(1, 2, 0).cpu().numpy()

    def inpaint_file(self, image_path: Path, mask_path: Path, output_path: Path) -> Path:
        """Read an image and mask, inpaint, and write the result as an 8-bit image."""
        image = load_rgb(image_path)
        mask = OcclusionMask(load_mask_grid(mask_path, image.shape[:2]))
        save_rgb(self.inpaint(image, mask), output_path)
        logger.info("inpainted", image=str(image_path), output=str(output_path))
        return output_path


def inpaint(
    checkpoint: Path,
    image: np.ndarray,
    mask: Union[OcclusionMask, np.ndarray],
    device: Optional[torch.device] = None,
) -> np.ndarray:
    """One-shot inpainting from a checkpoint directory."""
    return Inpainter.from_checkpoint(checkpoint, device).inpaint(image, mask)
