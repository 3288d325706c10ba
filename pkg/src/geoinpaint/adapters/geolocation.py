"""
Cross-view geolocation adapter.

Street-view queries are matched against clean satellite views. Training uses
identity classification summed over square-ring parts; retrieval uses the
concatenated, L2-normalized part features.
"""

import torch
import torch.nn.functional as F

from .base import TaskAdapter
from ..core.constants import TaskKind
from ..core.exceptions import ShapeMismatchError, TaskLabelError
from ..data.batch import BatchLabels

STREET = "street"
SATELLITE = "satellite"


class GeolocationAdapter(TaskAdapter):
    """Part-based identity classifier over street and satellite views."""

    kinds = (TaskKind.GEOLOCATION,)

    @property
    def num_identities(self) -> int:
        return int(self.config.num_identities)

    @property
    def parts(self) -> int:
        return int(self.network.parts)

    def part_logits(self, image: torch.Tensor, view: str = STREET) -> torch.Tensor:
        """N x parts x identities logits."""
        return self.network(self.normalize(image), view)

    def embed(self, image: torch.Tensor, view: str = STREET) -> torch.Tensor:
        """
        Retrieval embedding of one view.

        Returns:
            N x (parts * C) concatenated part features with unit L2 norm
        """
        feats = self.network.part_features(self.normalize(image), view)
        return F.normalize(feats.flatten(1), dim=1)

    def check_labels(self, labels: BatchLabels, image: torch.Tensor) -> None:
        if labels.identities is None:
            raise TaskLabelError("Geolocation needs identity ids")
        if labels.satellite is None:
            raise TaskLabelError("Geolocation needs the paired satellite view")
        if labels.satellite.shape[0] != image.shape[0]:
            raise ShapeMismatchError(
                f"{labels.satellite.shape[0]} satellite views for {image.shape[0]} street images"
            )
        ids = labels.identities
        if ids.numel() and (int(ids.min()) < 0 or int(ids.max()) >= self.num_identities):
            raise TaskLabelError(
                f"Identities must lie in [0, {self.num_identities}), got {ids.tolist()}"
            )

    def loss(self, image: torch.Tensor, labels: BatchLabels) -> torch.Tensor:
        """Sum over parts of the street-view identity cross-entropy."""
        self.check_labels(labels, image)
        logits = self.part_logits(image, STREET)
        target = labels.identities.to(image.device)
        return sum(F.cross_entropy(logits[:, p], target) for p in range(logits.shape[1]))

    @torch.no_grad()
    def predict(self, image: torch.Tensor) -> torch.Tensor:
        """Identity with the highest part-summed softmax score."""
        return self.part_logits(image, STREET).softmax(dim=2).sum(dim=1).argmax(dim=1)


def geolocation_loss(
    adapter: GeolocationAdapter,
    street: torch.Tensor,
    satellite: torch.Tensor,
    identities: torch.Tensor,
) -> torch.Tensor:
    """Part-summed identity cross-entropy of a street image paired with its satellite view."""
    if satellite is None:
        raise TaskLabelError("Geolocation needs the paired satellite view")
    labels = BatchLabels(kind=adapter.kind, identities=identities, satellite=satellite)
    return adapter.loss(street, labels)
