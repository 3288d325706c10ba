"""
Pytest configuration and shared fixtures.

This module provides common fixtures and configuration for all tests: a tiny
run configuration that trains in seconds on CPU, synthetic images and masks
written to disk, and a manifest tying them together.
"""

import json
import shutil
import tempfile
from pathlib import Path

import numpy as np
import pytest

IMAGE_SIZE = 64
NUM_CLASSES = 3
TRAIN_IMAGES = 6
TEST_IMAGES = 4

# Per-class base colours of the synthetic scenes
CLASS_COLOURS = [
    (0.8, 0.3, 0.2),
    (0.2, 0.7, 0.3),
    (0.25, 0.35, 0.85),
]


def scene(class_id: int, index: int, size: int = IMAGE_SIZE) -> np.ndarray:
    """Smooth synthetic scene: class colour plus a gentle index-dependent gradient."""
    ys, xs = np.mgrid[0:size, 0:size] / float(size - 1)
    base = np.array(CLASS_COLOURS[class_id % len(CLASS_COLOURS)])
    phase = 0.1 * (index % 5)
    gradient = 0.15 * np.sin(2 * np.pi * (xs + phase))[..., None] + 0.1 * ys[..., None]
    return np.clip(base + gradient, 0.0, 1.0).astype(np.float32)


def rectangle_mask(size: int, top: int, left: int, height: int, width: int) -> np.ndarray:
    grid = np.zeros((size, size), dtype=np.uint8)
    grid[top:top + height, left:left + width] = 1
    return grid


@pytest.fixture
def temp_dir():
    """Create a temporary directory for testing."""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    shutil.rmtree(temp_path, ignore_errors=True)


@pytest.fixture
def seed_dir(temp_dir):
    """Directory of seed masks covering roughly 10-30% of the frame."""
    from geoinpaint.utils.imageio import save_mask_grid

    seeds = temp_dir / "seeds"
    save_mask_grid(rectangle_mask(IMAGE_SIZE, 20, 20, 24, 24), seeds / "square.png")
    save_mask_grid(rectangle_mask(IMAGE_SIZE, 10, 8, 20, 48), seeds / "band.png")
    yy, xx = np.mgrid[0:IMAGE_SIZE, 0:IMAGE_SIZE]
    disc = ((yy - 32) ** 2 + (xx - 30) ** 2 <= 18**2).astype(np.uint8)
    save_mask_grid(disc, seeds / "disc.png")
    return seeds


@pytest.fixture
def dataset_dir(temp_dir, seed_dir):
    """
    Synthetic classification dataset on disk with a JSON-lines manifest.

    Train records draw masks from the seed pool; test records carry a
    pre-baked rectangle mask.
    """
    from geoinpaint.utils.imageio import save_mask_grid, save_rgb

    root = temp_dir / "dataset"
    lines = []
    for i in range(TRAIN_IMAGES):
        label = i % NUM_CLASSES
        save_rgb(scene(label, i), root / "images" / f"train_{i}.png")
        lines.append(
            {
                "image": f"images/train_{i}.png",
                "seed_pool": "../seeds",
                "label": label,
                "split": "train",
            }
        )
    for i in range(TEST_IMAGES):
        label = i % NUM_CLASSES
        save_rgb(scene(label, i + 100), root / "images" / f"test_{i}.png")
        grid = rectangle_mask(IMAGE_SIZE, 8 + 4 * i, 12, 24, 28)
        save_mask_grid(grid, root / "masks" / f"test_{i}.png")
        lines.append(
            {
                "image": f"images/test_{i}.png",
                "mask": f"masks/test_{i}.png",
                "label": label,
                "split": "test",
            }
        )

    (root / "manifest.jsonl").write_text("\n".join(json.dumps(line) for line in lines) + "\n")
    return root


@pytest.fixture
def manifest_path(dataset_dir):
    return dataset_dir / "manifest.jsonl"


@pytest.fixture
def tiny_config(temp_dir, manifest_path):
    """Run configuration small enough for CPU tests (no downloads)."""
    from geoinpaint.config.models import RunConfig

    return RunConfig.model_validate(
        {
            "data": {"manifest": str(manifest_path), "image_size": IMAGE_SIZE, "batch_size": 2},
            "model": {
                "base_width": 4,
                "stage_blocks": [1, 1, 1, 1, 1, 1],
                "pretrained_encoder": False,
            },
            "discriminator": {"base_width": 4},
            "adapter": {
                "kind": "test_stub",
                "architecture": "stub",
                "num_classes": NUM_CLASSES,
                "stub_width": 4,
            },
            "loss": {"perceptual_pretrained": False},
            "training": {
                "max_steps": 4,
                "seed": 7,
                "log_every": 2,
                "checkpoint_every": 2,
                "device": "cpu",
            },
            "paths": {
                "checkpoint_dir": str(temp_dir / "checkpoints"),
                "report_dir": str(temp_dir / "reports"),
            },
        }
    )


@pytest.fixture
def manifest(tiny_config, manifest_path):
    from geoinpaint.data.manifest import load_manifest

    return load_manifest(manifest_path, tiny_config.task, tiny_config.data.image_size)


@pytest.fixture
def stub_adapter(tiny_config):
    """Frozen, untrained stub classifier adapter."""
    import torch

    from geoinpaint.adapters.factory import build_adapter

    torch.manual_seed(0)
    return build_adapter(tiny_config.adapter)


@pytest.fixture
def mock_logger(mocker):
    """Provide a mocked logger for testing."""
    return mocker.patch("geoinpaint.core.logging.get_logger")
