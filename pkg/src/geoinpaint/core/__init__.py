"""
Core utilities and framework for geoinpaint.

This package holds the fundamental building blocks (logging, error handling,
constants, mask-driven composition) together with the training, evaluation,
inpainting and checkpoint machinery in its submodules.
"""

from geoinpaint.core.exceptions import GeoInpaintError
from geoinpaint.core.logging import get_logger, setup_logging
from geoinpaint.core.constants import (
    AugmentKind,
    EvaluationMode,
    Split,
    TaskKind,
    TrainingVariant,
)
from geoinpaint.core.composition import compose_discriminator_input, compose_occluded

__all__ = [
    "GeoInpaintError",
    "get_logger",
    "setup_logging",
    "AugmentKind",
    "EvaluationMode",
    "Split",
    "TaskKind",
    "TrainingVariant",
    "compose_discriminator_input",
    "compose_occluded",
]
