"""
Application-wide constants for geoinpaint.

This module defines constants and enumerations used throughout the package.
"""

from enum import Enum

# Image geometry
DEFAULT_IMAGE_SIZE = 256
SEGMENTATION_IMAGE_SIZE = 512
DOWNSAMPLE_FACTOR = 32  # total stride of the encoder-decoder
IMAGE_CHANNELS = 3
GENERATOR_IN_CHANNELS = 4  # occluded RGB + mask
PIXEL_SCALE = 255.0  # 8-bit I/O <-> [0, 1]
OCCLUDED_FILL_VALUE = 0.0
MASK_PNG_OCCLUDED = 255

# Occlusion masks
MASKMIX_THRESHOLD = 0.5
OCCLUSION_RETRY_LIMIT = 50
RECOGNITION_AREA_RANGE = (0.15, 0.60)
GEOLOCATION_AREA_RANGE = (0.10, 0.20)

# Task networks
IGNORE_INDEX = 255
DEFAULT_LPN_PARTS = 4
IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)

# Optimisation
DEFAULT_LEARNING_RATE = 2e-4
DEFAULT_BETAS = (0.5, 0.999)
DEFAULT_BATCH_SIZE = 8

# Checkpoints
CHECKPOINT_FORMAT_VERSION = 1
GENERATOR_FILE = "generator.pt"
DISCRIMINATORS_FILE = "discriminators.pt"
OPTIMIZERS_FILE = "optimizers.pt"
TRAIN_STATE_FILE = "state.pt"
CONFIG_SNAPSHOT_FILE = "config.json"
META_FILE = "meta.json"

# Reports
REPORT_JSON_FILE = "report.json"
REPORT_CSV_FILE = "reports.csv"
LOSS_LOG_FILE = "losses.jsonl"
DIAGNOSTIC_FILE = "divergence.json"

# Environment
DETERMINISTIC_ENV_VAR = "GEOINPAINT_DETERMINISTIC"


class TaskKind(Enum):
    """Downstream task served by a frozen task network."""

    CLASSIFICATION = "classification"
    GEOLOCATION = "geolocation"
    SEGMENTATION = "segmentation"
    TEST_STUB = "test_stub"


class Split(Enum):
    """Dataset split of a manifest record."""

    TRAIN = "train"
    TEST = "test"


class AugmentKind(Enum):
    """Geometric operations available to MaskMix branches."""

    TRANSLATE = "translate"
    SHEAR = "shear"
    ROTATE = "rotate"


class EvaluationMode(Enum):
    """What is fed to the metrics and the task network during evaluation."""

    INPAINTED = "inpainted"
    OCCLUDED = "occluded"
    CLEAN = "clean"


class TrainingVariant(Enum):
    """Ablation variant implied by the task weight and the MaskMix flag."""

    BASELINE = "baseline"
    TASK_DRIVEN = "task_driven"
    FULL = "full"


# Task loss balance weight used when the configuration leaves it unset
DEFAULT_TASK_WEIGHTS = {
    TaskKind.CLASSIFICATION: 5.0,
    TaskKind.SEGMENTATION: 5.0,
    TaskKind.GEOLOCATION: 1.2,
    TaskKind.TEST_STUB: 5.0,
}

# Synthetic occlusion area ratio per task; recognition range when absent
TASK_AREA_RANGES = {
    TaskKind.GEOLOCATION: GEOLOCATION_AREA_RANGE,
}

IMAGE_EXTENSIONS = {".png", ".jpg", ".jpeg"}
