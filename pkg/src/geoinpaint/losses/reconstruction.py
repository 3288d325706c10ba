"""
Pixel and perceptual reconstruction losses.
"""

import lpips
import torch
from torch import nn

from ..core.exceptions import ShapeMismatchError
from ..core.logging import get_logger

logger = get_logger(__name__)


def _check_pair(a: torch.Tensor, b: torch.Tensor) -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(
            f"Loss inputs differ in shape: {tuple(a.shape)} vs {tuple(b.shape)}"
        )


def l1_loss(reconstruction: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Mean absolute difference over all pixels and channels."""
    _check_pair(reconstruction, target)
    return (reconstruction - target).abs().mean()


class PerceptualLoss(nn.Module):
    """
    LPIPS distance on a frozen VGG16 feature extractor.

    Unit-normalized activations at five depths are compared with squared
    differences, weighted per channel by the learned linear heads, spatially
    averaged and summed over depths. Inputs are [0, 1] images; the batch mean
    is returned.
    """

    def __init__(self, pretrained: bool = True):
        super().__init__()
        # pnet_rand skips the ImageNet download; linear heads always ship with lpips
        self.metric = lpips.LPIPS(
            net="vgg", pretrained=True, pnet_rand=not pretrained, verbose=False
        )
        self.metric.eval()
        self.metric.requires_grad_(False)

    def train(self, mode: bool = True) -> "PerceptualLoss":
        # the extractor always stays in eval mode
        super().train(mode)
        self.metric.eval()
        return self

    def forward(self, reconstruction: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
        _check_pair(reconstruction, target)
        return self.metric(reconstruction, target, normalize=True).mean()
