"""
Conditional 70x70 patch discriminator.

The occluded input image is concatenated with the candidate (ground truth or
composed reconstruction) and scored by a five-convolution stack whose output
cells each see a 70x70 input patch. A 256x256 input yields a 30x30 grid.
"""

from typing import Sequence

import torch
from torch import nn

from ..config.models import DiscriminatorConfig
from ..core.exceptions import ShapeMismatchError

KERNEL_SIZE = 4
# stride of each convolution, input side first
LAYER_STRIDES = (2, 2, 2, 1, 1)


def _conv_block(in_channels: int, out_channels: int, stride: int) -> nn.Sequential:
    """Conv2d -> BatchNorm2d -> LeakyReLU"""
    return nn.Sequential(
        nn.Conv2d(in_channels, out_channels, KERNEL_SIZE, stride=stride, padding=1, bias=False),
        nn.BatchNorm2d(out_channels),
        nn.LeakyReLU(0.2, inplace=True),
    )


class PatchDiscriminator(nn.Module):
    """Outputs one real/fake logit per 70x70 patch."""

    def __init__(self, config: DiscriminatorConfig):
        super().__init__()
        self.config = config
        w = config.base_width
        first, *middle, last = LAYER_STRIDES
        widths = [w * 2**min(i + 1, 3) for i in range(len(middle))]
        layers = [
            nn.Conv2d(config.in_channels, w, KERNEL_SIZE, stride=first, padding=1),
            nn.LeakyReLU(0.2, inplace=True),
        ]
        for in_width, out_width, stride in zip([w] + widths, widths, middle):
            layers.append(_conv_block(in_width, out_width, stride))
        layers.append(nn.Conv2d(widths[-1], 1, KERNEL_SIZE, stride=last, padding=1))
        self.net = nn.Sequential(*layers)

    def forward(self, condition: torch.Tensor, candidate: torch.Tensor) -> torch.Tensor:
        """
        Score a candidate image conditioned on the occluded input.

        Args:
            condition: N x 3 x H x W occluded image
            candidate: N x 3 x H x W real or composed fake image

        Returns:
            N x 1 x H' x W' logits

        Raises:
            ShapeMismatchError: If the two inputs differ in shape or channel count
        """
        if condition.shape != candidate.shape:
            raise ShapeMismatchError(
                f"Condition {tuple(condition.shape)} and candidate {tuple(candidate.shape)} differ"
            )
        x = torch.cat([condition, candidate], dim=1)
        if x.shape[1] != self.config.in_channels:
            raise ShapeMismatchError(
                f"Discriminator expects {self.config.in_channels} channels, got {x.shape[1]}"
            )
        return self.net(x)


def receptive_field(strides: Sequence[int], kernel: int = KERNEL_SIZE) -> int:
    """Input side length seen by one output cell of a stack of square convolutions."""
    field = 1
    for stride in reversed(strides):
        field = field * stride + (kernel - stride)
    return field


PATCH_SIZE = receptive_field(LAYER_STRIDES)
