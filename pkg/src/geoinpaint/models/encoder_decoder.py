"""
Encoder-decoder template shared by the coarse and refinement networks.

The encoder is a ResNet-34-style trunk: an input convolution, four residual
stages (strides 1, 2, 2, 2) and two extra max-pooled residual stages, for a
total downsampling of 32. A dilated bridge sits at the bottom and six decoder
stages climb back up, each concatenating the matching encoder stage.
"""

from typing import List, Tuple

import torch
import torch.nn.functional as F
from torch import nn
from torchvision.models import ResNet34_Weights, resnet34
from torchvision.models.resnet import BasicBlock

from ..config.models import EncoderDecoderConfig
from ..core.constants import DOWNSAMPLE_FACTOR
from ..core.exceptions import ShapeMismatchError
from ..core.logging import get_logger

logger = get_logger(__name__)

# encoder stages copied from an ImageNet ResNet-34 when pretrained_encoder is set
PRETRAINED_STAGES = 3


def conv_bn_relu(in_channels: int, out_channels: int, dilation: int = 1) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_channels, out_channels, 3, padding=dilation, dilation=dilation, bias=False),
        nn.BatchNorm2d(out_channels),
        nn.ReLU(inplace=True),
    )


def residual_stage(in_channels: int, out_channels: int, blocks: int, stride: int) -> nn.Sequential:
    """Stack of BasicBlocks laid out like ``torchvision`` ResNet layers."""
    downsample = None
    if stride != 1 or in_channels != out_channels:
        downsample = nn.Sequential(
            nn.Conv2d(in_channels, out_channels, 1, stride=stride, bias=False),
            nn.BatchNorm2d(out_channels),
        )
    layers = [BasicBlock(in_channels, out_channels, stride=stride, downsample=downsample)]
    layers += [BasicBlock(out_channels, out_channels) for _ in range(blocks - 1)]
    return nn.Sequential(*layers)


def check_spatial_size(height: int, width: int) -> None:
    """
    Raises:
        ShapeMismatchError: If either side is not divisible by 32
    """
    if height % DOWNSAMPLE_FACTOR or width % DOWNSAMPLE_FACTOR:
        raise ShapeMismatchError(
            f"Input size {height}x{width} is not divisible by {DOWNSAMPLE_FACTOR}"
        )


class EncoderDecoder(nn.Module):
    """U-shaped network with six encoder-decoder skip connections."""

    def __init__(self, config: EncoderDecoderConfig):
        super().__init__()
        self.config = config
        widths = config.stage_widths
        blocks = config.stage_blocks

        self.inconv = conv_bn_relu(config.in_channels, widths[0])

        stages: List[nn.Module] = []
        in_ch = widths[0]
        for i, (width, n_blocks) in enumerate(zip(widths, blocks)):
            if i < 4:
                stages.append(residual_stage(in_ch, width, n_blocks, stride=1 if i == 0 else 2))
            else:
                stages.append(
                    nn.Sequential(
                        nn.MaxPool2d(2, 2, ceil_mode=True),
                        residual_stage(in_ch, width, n_blocks, stride=1),
                    )
                )
            in_ch = width
        self.encoder = nn.ModuleList(stages)

        self.bridge = nn.Sequential(
            conv_bn_relu(widths[-1], widths[-1], dilation=2),
            conv_bn_relu(widths[-1], widths[-1], dilation=2),
            conv_bn_relu(widths[-1], widths[-1], dilation=2),
        )

        decoders: List[nn.Module] = []
        prev = widths[-1]
        for i in reversed(range(len(widths))):
            out_ch = widths[i - 1] if i > 0 else widths[0]
            decoders.append(
                nn.Sequential(
                    conv_bn_relu(prev + widths[i], out_ch),
                    conv_bn_relu(out_ch, out_ch),
                )
            )
            prev = out_ch
        self.decoder = nn.ModuleList(decoders)

        self.head = nn.Conv2d(widths[0], config.out_channels, 3, padding=1)

        if config.pretrained_encoder:
            self.load_pretrained_encoder()

    @property
    def skip_pairs(self) -> List[Tuple[int, int]]:
        """(encoder stage, decoder stage) index pairs joined by a skip connection."""
        n = len(self.encoder)
        return [(n - 1 - j, j) for j in range(len(self.decoder))]

    def load_pretrained_encoder(self) -> bool:
        """
        Copy ImageNet ResNet-34 weights into the first three residual stages.

        Falls back to random initialization (with a warning) when the weights
        cannot be fetched or the stage layout differs from ResNet-34.
        """
        if self.config.base_width != 64 or tuple(self.config.stage_blocks[:3]) != (3, 4, 6):
            logger.warning(
                "pretrained_encoder_skipped", reason="stage layout differs from ResNet-34"
            )
            return False
        try:
            trunk = resnet34(weights=ResNet34_Weights.IMAGENET1K_V1)
        except Exception as e:  # download or cache failures
            logger.warning("pretrained_encoder_unavailable", error=str(e))
            return False

        layers = (trunk.layer1, trunk.layer2, trunk.layer3)
        for stage, layer in zip(self.encoder[:PRETRAINED_STAGES], layers):
            stage.load_state_dict(layer.state_dict())
        logger.debug("pretrained_encoder_loaded", stages=PRETRAINED_STAGES)
        return True

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        check_spatial_size(x.shape[-2], x.shape[-1])

        features = []
        h = self.inconv(x)
        for stage in self.encoder:
            h = stage(h)
            features.append(h)

        h = self.bridge(h)
        for j, (enc_idx, _) in enumerate(self.skip_pairs):
            skip = features[enc_idx]
            if h.shape[-2:] != skip.shape[-2:]:
                h = F.interpolate(h, size=skip.shape[-2:], mode="bilinear", align_corners=False)
            h = self.decoder[j](torch.cat([h, skip], dim=1))

        return self.head(h)
