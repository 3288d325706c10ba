"""
Deterministic-mode switch.

Set ``GEOINPAINT_DETERMINISTIC=1`` to make repeated runs from the same config
and seed produce identical losses.
"""

import os
import random

import numpy as np
import torch

from ..core.constants import DETERMINISTIC_ENV_VAR
from ..core.logging import get_logger

logger = get_logger(__name__)


def deterministic_mode_requested() -> bool:
    """True when the environment asks for deterministic execution."""
    return os.environ.get(DETERMINISTIC_ENV_VAR, "").strip().lower() in {"1", "true", "yes", "on"}


def seed_everything(seed: int, deterministic: bool = False) -> None:
    """
    Seed python, numpy and torch, optionally forcing deterministic kernels.

    Args:
        seed: Global seed
        deterministic: Also enable deterministic algorithms (or use the env var)
    """
    random.seed(seed)
    np.random.seed(seed % (2**32))
    torch.manual_seed(seed)

    if deterministic or deterministic_mode_requested():
        os.environ.setdefault("CUBLAS_WORKSPACE_CONFIG", ":4096:8")
        # warn_only: bilinear upsampling has no deterministic CUDA backward
        torch.use_deterministic_algorithms(True, warn_only=True)
        torch.backends.cudnn.benchmark = False
        torch.backends.cudnn.deterministic = True
        logger.info("deterministic_mode", seed=seed)


def resolve_device(name: str) -> torch.device:
    """Map ``auto`` to CUDA when available, otherwise pass the name through."""
    if name == "auto":
        return torch.device("cuda" if torch.cuda.is_available() else "cpu")
    return torch.device(name)
