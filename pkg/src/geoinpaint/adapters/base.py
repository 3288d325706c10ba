"""
Base class for frozen task adapters.

An adapter wraps a task network pretrained on clean images together with its
loss head. The network is frozen on construction: its parameters never
require grad and it always runs in eval mode, so gradients reach only the
input image.
"""

from abc import ABC, abstractmethod
from typing import Tuple

import torch
from torch import nn

from ..config.models import AdapterConfig
from ..core.constants import TaskKind
from ..core.exceptions import TaskAdapterError
from ..data.batch import BatchLabels
from ..utils.hash import calculate_module_digest, verify_module_digest


class TaskAdapter(nn.Module, ABC):
    """
    Abstract base class for task adapters.

    Subclasses implement ``loss`` (differentiable w.r.t. the image) and
    ``predict`` (hard predictions for metrics). Inputs are N x 3 x H x W
    images in [0, 1]; normalization happens in ``normalize``.
    """

    #: Task kinds a subclass can serve
    kinds: Tuple[TaskKind, ...] = ()

    def __init__(self, network: nn.Module, config: AdapterConfig):
        """
        Initialize adapter and freeze the network.

        Args:
            network: Pretrained task network
            config: Adapter configuration

        Raises:
            TaskAdapterError: If the adapter class does not serve ``config.kind``
        """
        super().__init__()
        if config.kind not in self.kinds:
            raise TaskAdapterError(
                f"{type(self).__name__} cannot serve task kind {config.kind.value}"
            )
        self.config = config
        self.network = network
        self.register_buffer("mean", torch.tensor(config.mean).view(1, 3, 1, 1), persistent=False)
        self.register_buffer("std", torch.tensor(config.std).view(1, 3, 1, 1), persistent=False)
        self.freeze()

    @property
    def kind(self) -> TaskKind:
        return self.config.kind

    def freeze(self) -> None:
        """Exclude every network parameter from autograd and switch to eval mode."""
        self.network.requires_grad_(False)
        self.network.eval()

    def train(self, mode: bool = True) -> "TaskAdapter":
        super().train(mode)
        self.network.eval()
        return self

    def normalize(self, image: torch.Tensor) -> torch.Tensor:
        """Map a [0, 1] image to the network's input statistics."""
        return (image - self.mean) / self.std

    def checksum(self) -> str:
        """Digest over every network parameter and buffer."""
        return calculate_module_digest(self.network)

    def is_unchanged_since(self, checksum: str) -> bool:
        """Whether the network still matches a digest taken by :meth:`checksum`."""
        return verify_module_digest(self.network, checksum)

    @abstractmethod
    def loss(self, image: torch.Tensor, labels: BatchLabels) -> torch.Tensor:
        """
        Task loss of the frozen network on ``image``.

        Args:
            image: N x 3 x H x W composed reconstruction in [0, 1]
            labels: Batch labels for this task kind

        Returns:
            Scalar loss, differentiable w.r.t. ``image``

        Raises:
            TaskLabelError: If labels are missing or out of range
        """
        pass

    @abstractmethod
    def predict(self, image: torch.Tensor) -> torch.Tensor:
        """
        Hard predictions for metrics.

        Args:
            image: N x 3 x H x W image in [0, 1]

        Returns:
            Class ids (N) or class maps (N x H x W)
        """
        pass
