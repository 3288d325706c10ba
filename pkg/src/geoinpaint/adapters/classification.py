"""
Scene classification adapter (also serves the test stub).
"""

import torch
import torch.nn.functional as F

from .base import TaskAdapter
from ..core.constants import TaskKind
from ..core.exceptions import TaskLabelError
from ..data.batch import BatchLabels


class ClassificationAdapter(TaskAdapter):
    """Cross-entropy of a frozen classifier's logits against class ids."""

    kinds = (TaskKind.CLASSIFICATION, TaskKind.TEST_STUB)

    @property
    def num_classes(self) -> int:
        return int(self.config.num_classes)

    def logits(self, image: torch.Tensor) -> torch.Tensor:
        return self.network(self.normalize(image))

    def check_labels(self, class_ids: torch.Tensor) -> None:
        if class_ids is None:
            raise TaskLabelError("Classification needs class ids")
        if class_ids.numel() and not (
            0 <= int(class_ids.min()) and int(class_ids.max()) < self.num_classes
        ):
            raise TaskLabelError(
                f"Class ids must lie in [0, {self.num_classes}), got {class_ids.tolist()}"
            )

    def loss(self, image: torch.Tensor, labels: BatchLabels) -> torch.Tensor:
        self.check_labels(labels.class_ids)
        return F.cross_entropy(self.logits(image), labels.class_ids.to(image.device))

    @torch.no_grad()
    def predict(self, image: torch.Tensor) -> torch.Tensor:
        return self.logits(image).argmax(dim=1)


def classification_loss(
    adapter: ClassificationAdapter, image: torch.Tensor, class_ids: torch.Tensor
) -> torch.Tensor:
    """Cross-entropy of the frozen classifier on ``image`` against ``class_ids``."""
    return adapter.loss(image, BatchLabels(kind=adapter.kind, class_ids=class_ids))
