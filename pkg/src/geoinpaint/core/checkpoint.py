"""
Checkpoint persistence.

A checkpoint is a directory holding the generator, both discriminators and
the optimizer states in torch's native format, the train-state counters and
RNG state, a config snapshot and a plain ``meta.json``. ``meta.json`` is
moved in last, so a directory without it is incomplete.
"""

import json
import os
import shutil
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import torch

from .constants import (
    CHECKPOINT_FORMAT_VERSION,
    CONFIG_SNAPSHOT_FILE,
    DISCRIMINATORS_FILE,
    GENERATOR_FILE,
    META_FILE,
    OPTIMIZERS_FILE,
    TRAIN_STATE_FILE,
)
from .exceptions import CheckpointError, ConfigurationError
from .logging import get_logger
from .state import TrainState, build_train_state
from ..config.manager import load_config_from_file, save_config_to_file
from ..config.models import RunConfig
from ..models.generator import CoarseToFineGenerator

logger = get_logger(__name__)

STAGING_DIR = ".staging"
CHECKPOINT_FILES = (
    GENERATOR_FILE,
    DISCRIMINATORS_FILE,
    OPTIMIZERS_FILE,
    TRAIN_STATE_FILE,
    CONFIG_SNAPSHOT_FILE,
)


def _torch_load(path: Path, device: Optional[torch.device] = None) -> Any:
    if not path.is_file():
        raise CheckpointError(f"Checkpoint file missing: {path}")
    try:
        return torch.load(path, map_location=device or "cpu", weights_only=True)
    except Exception as e:  # torch raises RuntimeError, UnpicklingError, EOFError...
        raise CheckpointError(f"Corrupt checkpoint file {path}: {e}") from e


def read_meta(directory: Path) -> Dict[str, Any]:
    """
    Read and check ``meta.json``.

    Raises:
        CheckpointError: If missing, unparsable or of another format version
    """
    path = Path(directory) / META_FILE
    if not path.is_file():
        raise CheckpointError(f"No checkpoint at {directory} (missing {META_FILE})")
    try:
        meta = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise CheckpointError(f"Corrupt checkpoint metadata {path}: {e}") from e

    version = meta.get("format_version")
    if version != CHECKPOINT_FORMAT_VERSION:
        raise CheckpointError(
            f"Checkpoint format version {version} is not supported "
            f"(expected {CHECKPOINT_FORMAT_VERSION})"
        )
    return meta


def _write_files(state: TrainState, config: RunConfig, directory: Path) -> None:
    torch.save(state.generator.state_dict(), directory / GENERATOR_FILE)
    torch.save(
        {"coarse": state.d_coarse.state_dict(), "refined": state.d_refined.state_dict()},
        directory / DISCRIMINATORS_FILE,
    )
    torch.save(
        {
            "generator": state.opt_generator.state_dict(),
            "d_coarse": state.opt_d_coarse.state_dict(),
            "d_refined": state.opt_d_refined.state_dict(),
        },
        directory / OPTIMIZERS_FILE,
    )
    train_state = {
        "step": state.step,
        "running": dict(state.running),
        "torch_rng": torch.get_rng_state(),
    }
    if torch.cuda.is_available():
        train_state["cuda_rng"] = torch.cuda.get_rng_state_all()
    torch.save(train_state, directory / TRAIN_STATE_FILE)
    save_config_to_file(config, directory / CONFIG_SNAPSHOT_FILE)

    meta = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "step": state.step,
        "lambda_task": config.task_weight,
        "image_size": config.data.image_size,
        "task": config.task.value,
        "variant": config.variant.value,
    }
    (directory / META_FILE).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def save_checkpoint(state: TrainState, config: RunConfig, directory: Path) -> Path:
    """
    Write a checkpoint of ``state``.

    Every file is first written to a staging directory inside ``directory``
    and then renamed into place, ``meta.json`` last. A failed write leaves the
    previous checkpoint untouched; other files in ``directory`` (the loss log,
    ``divergence.json``) are never moved.

    Raises:
        CheckpointError: If the files cannot be written
    """
    directory = Path(directory)
    staging = directory / STAGING_DIR
    try:
        if staging.exists():
            shutil.rmtree(staging)
        staging.mkdir(parents=True)
        _write_files(state, config, staging)

        meta_path = directory / META_FILE
        if meta_path.exists():
            meta_path.unlink()
        for name in CHECKPOINT_FILES:
            os.replace(staging / name, directory / name)
        os.replace(staging / META_FILE, meta_path)
        staging.rmdir()
    except (OSError, RuntimeError, ConfigurationError) as e:
        shutil.rmtree(staging, ignore_errors=True)
        raise CheckpointError(f"Failed to write checkpoint to {directory}: {e}") from e

    logger.info("checkpoint_saved", path=str(directory), step=state.step)
    return directory


def load_checkpoint(
    directory: Path, config: RunConfig, device: Optional[torch.device] = None
) -> TrainState:
    """
    Restore a TrainState saved by ``save_checkpoint``.

    Args:
        directory: Checkpoint directory
        config: Run configuration the state must fit
        device: Device to load onto

    Raises:
        CheckpointError: On version mismatch, corrupt files, or an image size
            different from ``config.data.image_size``
    """
    directory = Path(directory)
    meta = read_meta(directory)
    if meta.get("image_size") != config.data.image_size:
        raise CheckpointError(
            f"Checkpoint was trained at image size {meta.get('image_size')}, "
            f"config asks for {config.data.image_size}"
        )

    state = build_train_state(
        config.model_copy(
            update={"model": config.model.model_copy(update={"pretrained_encoder": False})}
        ),
        device,
    )
    discriminators = _torch_load(directory / DISCRIMINATORS_FILE, device)
    optimizers = _torch_load(directory / OPTIMIZERS_FILE, device)
    train_state = _torch_load(directory / TRAIN_STATE_FILE)

    try:
        state.generator.load_state_dict(_torch_load(directory / GENERATOR_FILE, device))
        state.d_coarse.load_state_dict(discriminators["coarse"])
        state.d_refined.load_state_dict(discriminators["refined"])
        state.opt_generator.load_state_dict(optimizers["generator"])
        state.opt_d_coarse.load_state_dict(optimizers["d_coarse"])
        state.opt_d_refined.load_state_dict(optimizers["d_refined"])
        state.step = int(train_state["step"])
        state.running = dict(train_state.get("running", {}))
        torch.set_rng_state(train_state["torch_rng"])
        if "cuda_rng" in train_state and torch.cuda.is_available():
            torch.cuda.set_rng_state_all(train_state["cuda_rng"])
    except (KeyError, RuntimeError, ValueError, TypeError) as e:
        raise CheckpointError(
            f"Checkpoint {directory} does not fit the configured networks: {e}"
        ) from e

    logger.info("checkpoint_loaded", path=str(directory), step=state.step)
    return state


def load_generator(
    directory: Path, device: Optional[torch.device] = None
) -> Tuple[CoarseToFineGenerator, RunConfig, Dict[str, Any]]:
    """
    Load only the generator, configured from the checkpoint's config snapshot.

    Returns:
        (generator in eval mode, config snapshot, meta)

    Raises:
        CheckpointError: If the checkpoint is missing or corrupt
    """
    directory = Path(directory)
    meta = read_meta(directory)
    try:
        config = load_config_from_file(directory / CONFIG_SNAPSHOT_FILE)
    except ConfigurationError as e:
        raise CheckpointError(f"Corrupt config snapshot in {directory}: {e}") from e

    generator = CoarseToFineGenerator(config.model.model_copy(update={"pretrained_encoder": False}))
    try:
        generator.load_state_dict(_torch_load(directory / GENERATOR_FILE, device))
    except RuntimeError as e:
        raise CheckpointError(f"Generator weights in {directory} do not fit its config: {e}") from e

    generator.to(device or torch.device("cpu")).eval()
    return generator, config, meta
