"""
Task network builders.

Stand-in networks are tiny and train in seconds; the others wrap torchvision
architectures whose weights are supplied externally.
"""

from typing import Dict, Union

import torch
import torch.nn.functional as F
from torch import nn
from torchvision.models import resnet50, vgg16
from torchvision.models.segmentation import deeplabv3_resnet50

from ..core.constants import IMAGE_CHANNELS


class StubClassifier(nn.Module):
    """Two convolutions, global pooling and a linear head."""

    def __init__(self, num_classes: int, width: int = 16):
        super().__init__()
        self.features = nn.Sequential(
            nn.Conv2d(IMAGE_CHANNELS, width, 3, stride=2, padding=1),
            nn.ReLU(inplace=True),
            nn.Conv2d(width, 2 * width, 3, stride=2, padding=1),
            nn.ReLU(inplace=True),
            nn.AdaptiveAvgPool2d(1),
            nn.Flatten(),
        )
        self.head = nn.Linear(2 * width, num_classes)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.features(x))


class StubSegmenter(nn.Module):
    """Per-pixel classifier at full resolution."""

    def __init__(self, num_classes: int, width: int = 16):
        super().__init__()
        self.net = nn.Sequential(
            nn.Conv2d(IMAGE_CHANNELS, width, 3, padding=1),
            nn.ReLU(inplace=True),
            nn.Conv2d(width, num_classes, 1),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x)


def ring_index(height: int, width: int, parts: int, device=None) -> torch.Tensor:
    """
    Square-ring part id of each feature-map cell, 0 at the centre.

    Rings are bands of Chebyshev distance from the map centre, normalized so the
    outermost ring touches the border.
    """
    ys = torch.arange(height, device=device, dtype=torch.float32)
    ys = (ys - (height - 1) / 2) / (height / 2)
    xs = torch.arange(width, device=device, dtype=torch.float32)
    xs = (xs - (width - 1) / 2) / (width / 2)
    dist = torch.maximum(ys.abs()[:, None], xs.abs()[None, :])
    return torch.clamp((dist * parts).floor().long(), max=parts - 1)


def ring_pool(features: torch.Tensor, parts: int) -> torch.Tensor:
    """
    Average a feature map over square rings.

    Args:
        features: N x C x h x w
        parts: Number of rings

    Returns:
        N x parts x C; rings with no cell (tiny maps) fall back to the global mean
    """
    n, c, h, w = features.shape
    rings = ring_index(h, w, parts, device=features.device).reshape(-1)
    flat = features.reshape(n, c, h * w)
    global_mean = flat.mean(dim=2)
    pooled = []
    for p in range(parts):
        cells = rings == p
        if bool(cells.any()):
            pooled.append(flat[:, :, cells].mean(dim=2))
        else:
            pooled.append(global_mean)
    return torch.stack(pooled, dim=1)


class ClassBlock(nn.Module):
    """Bottleneck and identity classifier of one part."""

    def __init__(self, in_features: int, num_identities: int, bottleneck: int = 512):
        super().__init__()
        self.bottleneck = nn.Sequential(
            nn.Linear(in_features, bottleneck),
            nn.BatchNorm1d(bottleneck),
            nn.Dropout(0.5),
        )
        self.classifier = nn.Linear(bottleneck, num_identities)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.classifier(self.bottleneck(x))


class PartNetwork(nn.Module):
    """
    Part-based cross-view network.

    Street and satellite views each have a convolutional trunk; ring-pooled part
    features go through per-part identity classifiers shared across views.
    """

    def __init__(
        self,
        street: nn.Module,
        satellite: nn.Module,
        feature_dim: int,
        num_identities: int,
        parts: int,
        bottleneck: int = 512,
    ):
        super().__init__()
        self.parts = parts
        self.trunks = nn.ModuleDict({"street": street, "satellite": satellite})
        self.classifiers = nn.ModuleList(
            ClassBlock(feature_dim, num_identities, bottleneck) for _ in range(parts)
        )

    def part_features(self, x: torch.Tensor, view: str) -> torch.Tensor:
        """N x parts x C ring-pooled features."""
        return ring_pool(self.trunks[view](x), self.parts)

    def forward(self, x: torch.Tensor, view: str = "street") -> torch.Tensor:
        """N x parts x identities logits."""
        feats = self.part_features(x, view)
        return torch.stack([head(feats[:, p]) for p, head in enumerate(self.classifiers)], dim=1)


def stub_trunk(width: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(IMAGE_CHANNELS, width, 3, stride=2, padding=1),
        nn.ReLU(inplace=True),
        nn.Conv2d(width, width, 3, stride=2, padding=1),
        nn.ReLU(inplace=True),
    )


def resnet50_trunk() -> nn.Sequential:
    """ResNet-50 up to layer4 with the last stride removed."""
    net = resnet50(weights=None)
    net.layer4[0].conv2.stride = (1, 1)
    net.layer4[0].downsample[0].stride = (1, 1)
    return nn.Sequential(
        net.conv1, net.bn1, net.relu, net.maxpool, net.layer1, net.layer2, net.layer3, net.layer4
    )


def build_part_network(
    architecture: str, num_identities: int, parts: int, stub_width: int
) -> PartNetwork:
    if architecture == "stub":
        return PartNetwork(
            stub_trunk(stub_width), stub_trunk(stub_width), stub_width, num_identities, parts,
            bottleneck=stub_width,
        )
    return PartNetwork(resnet50_trunk(), resnet50_trunk(), 2048, num_identities, parts)


def build_classifier(architecture: str, num_classes: int, stub_width: int) -> nn.Module:
    if architecture == "stub":
        return StubClassifier(num_classes, stub_width)
    return vgg16(weights=None, num_classes=num_classes)


def build_segmenter(architecture: str, num_classes: int, stub_width: int) -> nn.Module:
    if architecture == "stub":
        return StubSegmenter(num_classes, stub_width)
    return deeplabv3_resnet50(
        weights=None, weights_backbone=None, num_classes=num_classes, aux_loss=False
    )


def segmentation_logits(output: Union[torch.Tensor, Dict[str, torch.Tensor]]) -> torch.Tensor:
    """Unwrap torchvision's ``{"out": logits}`` dictionaries."""
    if isinstance(output, dict):
        return output["out"]
    return output


def upsample_logits(logits: torch.Tensor, size) -> torch.Tensor:
    if logits.shape[-2:] == tuple(size):
        return logits
    return F.interpolate(logits, size=size, mode="bilinear", align_corners=False)
