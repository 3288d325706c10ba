"""
Configuration management for geoinpaint.

This module handles loading, validation, and saving of run configuration
using Pydantic for validation.
"""

from geoinpaint.config.models import (
    AdapterConfig,
    DataConfig,
    DiscriminatorConfig,
    EncoderDecoderConfig,
    LossConfig,
    MixConfig,
    OcclusionSpec,
    OptimConfig,
    PathsConfig,
    RunConfig,
    TrainingConfig,
)
from geoinpaint.config.manager import (
    config_from_dict,
    create_config_template,
    get_default_config,
    load_config_from_file,
    save_config_to_file,
    validate_config,
)

__all__ = [
    "AdapterConfig",
    "DataConfig",
    "DiscriminatorConfig",
    "EncoderDecoderConfig",
    "LossConfig",
    "MixConfig",
    "OcclusionSpec",
    "OptimConfig",
    "PathsConfig",
    "RunConfig",
    "TrainingConfig",
    "config_from_dict",
    "create_config_template",
    "get_default_config",
    "load_config_from_file",
    "save_config_to_file",
    "validate_config",
]
