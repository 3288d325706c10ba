"""
Adapter construction from configuration.
"""

from pathlib import Path
from typing import Dict, Optional, Type

import torch
from torch import nn

from .base import TaskAdapter
from .classification import ClassificationAdapter
from .geolocation import GeolocationAdapter
from .networks import build_classifier, build_part_network, build_segmenter
from .segmentation import SegmentationAdapter
from ..config.models import AdapterConfig
from ..core.constants import TaskKind
from ..core.exceptions import TaskAdapterError
from ..core.logging import get_logger

logger = get_logger(__name__)

ADAPTER_CLASSES: Dict[TaskKind, Type[TaskAdapter]] = {
    TaskKind.CLASSIFICATION: ClassificationAdapter,
    TaskKind.TEST_STUB: ClassificationAdapter,
    TaskKind.GEOLOCATION: GeolocationAdapter,
    TaskKind.SEGMENTATION: SegmentationAdapter,
}

_ARCHITECTURES = {
    TaskKind.CLASSIFICATION: {"vgg16", "stub", "torchscript"},
    TaskKind.TEST_STUB: {"stub"},
    TaskKind.GEOLOCATION: {"lpn", "stub"},
    TaskKind.SEGMENTATION: {"deeplabv3_resnet50", "stub", "torchscript"},
}


def load_state(network: nn.Module, path: Path) -> None:
    """
    Load a state dict saved with ``torch.save``.

    Raises:
        TaskAdapterError: If the file is unreadable or does not fit the network
    """
    try:
        state = torch.load(path, map_location="cpu", weights_only=True)
        if isinstance(state, dict) and "state_dict" in state:
            state = state["state_dict"]
        network.load_state_dict(state)
    except (OSError, RuntimeError, KeyError, ValueError) as e:
        raise TaskAdapterError(f"Cannot load task weights from {path}: {e}") from e


def build_network(config: AdapterConfig) -> nn.Module:
    """Instantiate (and load, when configured) the task network."""
    allowed = _ARCHITECTURES[config.kind]
    if config.architecture not in allowed:
        raise TaskAdapterError(
            f"Architecture {config.architecture} is not available for {config.kind.value}; "
            f"choose one of {sorted(allowed)}"
        )

    if config.architecture == "torchscript":
        try:
            return torch.jit.load(str(config.weights_path), map_location="cpu")
        except (OSError, RuntimeError, ValueError) as e:
            raise TaskAdapterError(
                f"Cannot load TorchScript module {config.weights_path}: {e}"
            ) from e

    if config.kind == TaskKind.GEOLOCATION:
        network = build_part_network(
            config.architecture, config.num_identities, config.parts, config.stub_width
        )
    elif config.kind == TaskKind.SEGMENTATION:
        network = build_segmenter(config.architecture, config.num_classes, config.stub_width)
    else:
        network = build_classifier(config.architecture, config.num_classes, config.stub_width)

    if config.weights_path is not None:
        load_state(network, config.weights_path)
    else:
        logger.warning(
            "task_network_untrained",
            kind=config.kind.value,
            architecture=config.architecture,
        )
    return network


def build_adapter(
    config: AdapterConfig,
    network: Optional[nn.Module] = None,
    device: Optional[torch.device] = None,
) -> TaskAdapter:
    """
    Build a frozen adapter for the configured task.

    Args:
        config: Adapter configuration
        network: Already constructed network, bypassing ``build_network``
        device: Device to move the adapter to

    Returns:
        Frozen TaskAdapter

    Raises:
        TaskAdapterError: If the network cannot be built or loaded
    """
    if network is None:
        network = build_network(config)
    adapter = ADAPTER_CLASSES[config.kind](network, config)
    if device is not None:
        adapter = adapter.to(device)
    logger.info(
        "adapter_ready",
        kind=config.kind.value,
        architecture=config.architecture,
        checksum=adapter.checksum()[:12],
    )
    return adapter
