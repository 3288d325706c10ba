"""
Coarse-to-fine generator.

``R_coarse = sigmoid(coarse(I ++ M))``, ``E = refine(R_coarse ++ M)`` and
``R_refined = R_coarse + E``. The residual is unbounded; clamping to [0, 1]
happens only when results are composed for output or metrics.
"""

from dataclasses import dataclass
from typing import Tuple

import torch
from torch import nn

from .encoder_decoder import EncoderDecoder, check_spatial_size
from ..config.models import EncoderDecoderConfig
from ..core.exceptions import ShapeMismatchError


@dataclass
class GeneratorOutput:
    coarse: torch.Tensor
    residual: torch.Tensor
    refined: torch.Tensor


class CoarseToFineGenerator(nn.Module):
    """Two independent encoder-decoders joined by a residual skip."""

    def __init__(self, config: EncoderDecoderConfig):
        super().__init__()
        self.config = config
        self.coarse = EncoderDecoder(config)
        # refinement sees R_coarse (3) + mask (1), same template
        self.refine = EncoderDecoder(
            config.model_copy(update={"in_channels": config.out_channels + 1})
        )

    def coarse_forward(self, generator_input: torch.Tensor) -> torch.Tensor:
        """
        Predict the coarse reconstruction from the occluded image and mask.

        Args:
            generator_input: N x 4 x H x W, last channel is the binary mask

        Returns:
            N x 3 x H x W map in [0, 1]

        Raises:
            ShapeMismatchError: If H or W is not divisible by 32
        """
        if generator_input.dim() != 4 or generator_input.shape[1] != self.config.in_channels:
            raise ShapeMismatchError(
                f"Generator input must be N x {self.config.in_channels} x H x W, "
                f"got {tuple(generator_input.shape)}"
            )
        return torch.sigmoid(self.coarse(generator_input))

    def refine_forward(
        self, coarse: torch.Tensor, mask: torch.Tensor
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        """
        Predict the residual correction and add it to the coarse map.

        Returns:
            (E_residual, R_refined) with ``R_refined == coarse + E_residual``

        Raises:
            ShapeMismatchError: If the mask does not match the coarse map
        """
        expected = (coarse.shape[0], 1, *coarse.shape[2:])
        if tuple(mask.shape) != expected:
            raise ShapeMismatchError(
                f"Mask {tuple(mask.shape)} does not match coarse map {tuple(coarse.shape)}"
            )
        residual = self.refine(torch.cat([coarse, mask], dim=1))
        return residual, coarse + residual

    def forward(self, generator_input: torch.Tensor, mask: torch.Tensor) -> GeneratorOutput:
        check_spatial_size(generator_input.shape[-2], generator_input.shape[-1])
        coarse = self.coarse_forward(generator_input)
        residual, refined = self.refine_forward(coarse, mask)
        return GeneratorOutput(coarse=coarse, residual=residual, refined=refined)
