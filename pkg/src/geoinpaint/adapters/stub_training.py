"""
Training script for the stand-in classifier.

The stub is fitted on clean training images only, then frozen like any other
task network.
"""

from pathlib import Path
from typing import Optional

import numpy as np
import torch
import torch.nn.functional as F
from tqdm import tqdm

from .networks import StubClassifier
from ..config.models import RunConfig
from ..core.constants import Split, TaskKind
from ..core.exceptions import TaskAdapterError
from ..core.logging import get_logger
from ..data.manifest import DatasetManifest
from ..utils.imageio import load_rgb
from ..utils.seeding import epoch_permutation

logger = get_logger(__name__)


def train_stub_classifier(
    manifest: DatasetManifest,
    config: RunConfig,
    output_path: Path,
    epochs: int = 30,
    learning_rate: float = 1e-3,
    device: Optional[torch.device] = None,
    show_progress: bool = False,
) -> float:
    """
    Fit the stub classifier on clean training images and save its weights.

    Args:
        manifest: Classification or test-stub manifest
        config: Run configuration (adapter width, classes, seed, batch size)
        output_path: Where the state dict is written
        epochs: Passes over the training split
        learning_rate: Adam learning rate
        device: Training device
        show_progress: Display a tqdm bar

    Returns:
        Training-set accuracy in percent after the last epoch

    Raises:
        TaskAdapterError: If the manifest does not hold class labels or is empty
    """
    if manifest.task not in (TaskKind.CLASSIFICATION, TaskKind.TEST_STUB):
        raise TaskAdapterError(f"Stub classifier needs class labels, got {manifest.task.value}")
    records = manifest.split(Split.TRAIN)
    if not records:
        raise TaskAdapterError("No training records to fit the stub classifier on")

    device = device or torch.device("cpu")
    adapter_cfg = config.adapter
    size = (manifest.image_size, manifest.image_size)
    torch.manual_seed(config.training.seed)

    images = np.stack([load_rgb(r.image, size) for r in records])
    images = torch.from_numpy(images).permute(0, 3, 1, 2)
    labels = torch.tensor([int(r.label) for r in records], dtype=torch.long)
    if int(labels.max()) >= adapter_cfg.num_classes:
        raise TaskAdapterError(
            f"Label {int(labels.max())} exceeds num_classes={adapter_cfg.num_classes}"
        )

    mean = torch.tensor(adapter_cfg.mean).view(1, 3, 1, 1)
    std = torch.tensor(adapter_cfg.std).view(1, 3, 1, 1)
    inputs = ((images - mean) / std).to(device)
    labels = labels.to(device)

    network = StubClassifier(adapter_cfg.num_classes, adapter_cfg.stub_width).to(device)
    optimizer = torch.optim.Adam(network.parameters(), lr=learning_rate)
    batch_size = config.data.batch_size

    network.train()
    for epoch in tqdm(range(epochs), desc="Training stub", disable=not show_progress):
        order = torch.from_numpy(epoch_permutation(config.training.seed, epoch, len(records)))
        for start in range(0, len(records), batch_size):
            idx = order[start:start + batch_size].to(device)
            optimizer.zero_grad()
            loss = F.cross_entropy(network(inputs[idx]), labels[idx])
            loss.backward()
            optimizer.step()
        logger.debug("stub_epoch", epoch=epoch, loss=float(loss))

    network.eval()
    with torch.no_grad():
        accuracy = 100.0 * float((network(inputs).argmax(dim=1) == labels).float().mean())

    output_path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(network.state_dict(), output_path)
    logger.info("stub_trained", path=str(output_path), accuracy=round(accuracy, 2), epochs=epochs)
    return accuracy
