"""
Configuration management for geoinpaint.

This module handles loading, saving, and validating run configuration files.
"""

import copy
import json
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from .models import RunConfig
from ..core.constants import SEGMENTATION_IMAGE_SIZE, TaskKind
from ..core.exceptions import ConfigurationError


def _resolve_relative(data: dict, base: Path) -> dict:
    """Resolve data and adapter paths relative to the config file's directory."""
    data = copy.deepcopy(data)
    for section, key in (("data", "manifest"), ("data", "seed_pool"), ("adapter", "weights_path")):
        value = data.get(section, {}).get(key)
        if value and not Path(value).is_absolute():
            data[section][key] = str(base / value)
    return data


def load_config_from_file(config_path: Path) -> RunConfig:
    """
    Load configuration from a JSON file.

    Relative ``data.manifest``, ``data.seed_pool`` and ``adapter.weights_path``
    entries are resolved against the directory holding the file.

    Args:
        config_path: Path to configuration file

    Returns:
        RunConfig object

    Raises:
        ConfigurationError: If file cannot be loaded or is invalid

    Examples:
        >>> config = load_config_from_file(Path("configs/rsscn7.json"))
    """
    if not config_path.exists():
        raise ConfigurationError(f"Configuration file not found: {config_path}")

    try:
        with config_path.open("r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Invalid JSON in configuration file: {e}") from e
    except OSError as e:
        raise ConfigurationError(f"Failed to load configuration: {e}") from e
    return config_from_dict(data, base=config_path.parent)


def save_config_to_file(config: RunConfig, config_path: Path) -> None:
    """
    Save configuration to a JSON file.

    Args:
        config: RunConfig object to save
        config_path: Path to save configuration file

    Raises:
        ConfigurationError: If file cannot be saved
    """
    try:
        config_path.parent.mkdir(parents=True, exist_ok=True)
        data = config.model_dump(mode="json")
        with config_path.open("w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, ensure_ascii=False)

    except OSError as e:
        raise ConfigurationError(f"Failed to save configuration: {e}") from e


def config_from_dict(data: dict, base: Optional[Path] = None) -> RunConfig:
    """
    Build a configuration from an in-memory dictionary.

    Args:
        data: Nested dictionary in the config file schema
        base: Directory that relative data and weight paths are resolved against

    Returns:
        RunConfig object

    Raises:
        ConfigurationError: If validation fails
    """
    if not isinstance(data, dict):
        raise ConfigurationError(f"Configuration must be a JSON object, got {type(data).__name__}")
    try:
        if base is not None:
            data = _resolve_relative(data, base)
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"Configuration validation failed: {e}") from e
    except (AttributeError, TypeError) as e:
        raise ConfigurationError(f"Malformed configuration section: {e}") from e


def validate_config(config: RunConfig) -> List[str]:
    """
    Validate configuration and return list of issues.

    Structural rules are enforced by the models themselves; this checks the
    things a model cannot know about, such as files on disk.

    Args:
        config: RunConfig object to validate

    Returns:
        List of validation error messages (empty if valid)

    Examples:
        >>> errors = validate_config(get_default_config())
        >>> if errors:
        ...     print("Validation errors:", errors)
    """
    errors = []

    if config.data.manifest and not config.data.manifest.exists():
        errors.append(f"Manifest does not exist: {config.data.manifest}")

    if config.data.seed_pool and not config.data.seed_pool.is_dir():
        errors.append(f"Seed mask pool is not a directory: {config.data.seed_pool}")

    weights = config.adapter.weights_path
    if weights and not weights.exists():
        errors.append(f"Adapter weights do not exist: {weights}")

    if config.adapter.architecture != "stub" and weights is None:
        errors.append(
            f"Adapter architecture '{config.adapter.architecture}' needs weights_path "
            "(task networks are trained on clean images elsewhere)"
        )

    if config.task == TaskKind.SEGMENTATION and config.data.image_size != SEGMENTATION_IMAGE_SIZE:
        errors.append(
            f"Segmentation runs are usually {SEGMENTATION_IMAGE_SIZE}px, "
            f"got {config.data.image_size}"
        )

    if config.training.checkpoint_every > config.training.max_steps:
        errors.append(
            f"checkpoint_every ({config.training.checkpoint_every}) exceeds "
            f"max_steps ({config.training.max_steps}); only the final checkpoint is written"
        )

    return errors


def get_default_config() -> RunConfig:
    """
    Get default configuration.

    Returns:
        RunConfig object with all default values
    """
    return RunConfig()


def create_config_template(output_path: Path) -> None:
    """
    Create a configuration template file.

    Args:
        output_path: Path to save template

    Examples:
        >>> create_config_template(Path("run.json"))
    """
    save_config_to_file(get_default_config(), output_path)
