"""
Configuration data models for geoinpaint.

This module defines Pydantic models for configuration validation. Every
section rejects unknown keys so that typos in a config file surface early.
"""

from pathlib import Path
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.constants import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_BETAS,
    DEFAULT_IMAGE_SIZE,
    DEFAULT_LEARNING_RATE,
    DEFAULT_LPN_PARTS,
    DEFAULT_TASK_WEIGHTS,
    DOWNSAMPLE_FACTOR,
    GENERATOR_IN_CHANNELS,
    IGNORE_INDEX,
    IMAGE_CHANNELS,
    IMAGENET_MEAN,
    IMAGENET_STD,
    LOSS_LOG_FILE,
    MASKMIX_THRESHOLD,
    OCCLUSION_RETRY_LIMIT,
    RECOGNITION_AREA_RANGE,
    TASK_AREA_RANGES,
    TaskKind,
    TrainingVariant,
)


class _Section(BaseModel):
    """Base for all configuration sections."""

    model_config = ConfigDict(extra="forbid")


class MixConfig(_Section):
    """MaskMix settings: three branches of three chained geometric operations."""

    branch_count: Literal[3] = 3
    chain_depth: Literal[3] = 3
    # (w1, w2, w3, w4); sampled per call when unset
    weights: Optional[Tuple[float, float, float, float]] = Field(default=None)
    dirichlet_alpha: float = Field(default=1.0, gt=0)
    beta_alpha: float = Field(default=1.0, gt=0)
    threshold: float = Field(default=MASKMIX_THRESHOLD, gt=0, lt=1)
    translate_fraction: float = Field(default=0.25, ge=0, le=1)
    shear_range: float = Field(default=0.3, ge=0)
    rotate_degrees: float = Field(default=45.0, ge=0, le=180)
    rng_seed: int = Field(default=0, ge=0)

    @field_validator("weights")
    @classmethod
    def validate_weights(
        cls, v: Optional[Tuple[float, float, float, float]]
    ) -> Optional[Tuple[float, float, float, float]]:
        """Mixing weights must be nonnegative."""
        if v is not None and any(w < 0 for w in v):
            raise ValueError(f"Mixing weights must be nonnegative, got {v}")
        return v


class OcclusionSpec(_Section):
    """Area constraint and placement transforms for synthetic occlusions."""

    area_lo: float = Field(default=RECOGNITION_AREA_RANGE[0], gt=0, lt=1)
    area_hi: float = Field(default=RECOGNITION_AREA_RANGE[1], gt=0, lt=1)
    rotate_degrees: float = Field(default=180.0, ge=0, le=180)
    translate_fraction: float = Field(default=0.25, ge=0, le=1)
    scale_range: Tuple[float, float] = Field(default=(0.25, 4.0))
    max_attempts: int = Field(default=OCCLUSION_RETRY_LIMIT, ge=1)

    @model_validator(mode="after")
    def validate_ranges(self) -> "OcclusionSpec":
        """Require 0 < area_lo <= area_hi < 1 and a positive scale range."""
        if self.area_lo > self.area_hi:
            raise ValueError(
                f"area_lo must not exceed area_hi, got [{self.area_lo}, {self.area_hi}]"
            )
        lo, hi = self.scale_range
        if lo <= 0 or lo > hi:
            raise ValueError(f"Invalid scale range: {self.scale_range}")
        return self


class EncoderDecoderConfig(_Section):
    """Template shared by the coarse and refinement encoder-decoders."""

    in_channels: int = Field(default=GENERATOR_IN_CHANNELS, ge=1)
    out_channels: int = Field(default=IMAGE_CHANNELS, ge=1)
    base_width: int = Field(default=64, ge=1)
    # residual blocks per encoder stage; ResNet-34 layers 1-4 then two extra stages
    stage_blocks: Tuple[int, int, int, int, int, int] = Field(default=(3, 4, 6, 3, 3, 3))
    skip_connections: Literal[6] = 6
    pretrained_encoder: bool = Field(default=True)

    @field_validator("stage_blocks")
    @classmethod
    def validate_blocks(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        """Every stage needs at least one block."""
        if any(b < 1 for b in v):
            raise ValueError(f"Each encoder stage needs at least one block, got {v}")
        return v

    @property
    def stage_widths(self) -> Tuple[int, ...]:
        """Channel width of each encoder stage (64, 128, 256, 512, 512, 512 by default)."""
        w = self.base_width
        return (w, 2 * w, 4 * w, 8 * w, 8 * w, 8 * w)


class DiscriminatorConfig(_Section):
    """70x70 conditional patch discriminator."""

    in_channels: int = Field(default=2 * IMAGE_CHANNELS, ge=2)
    base_width: int = Field(default=64, ge=1)


class AdapterConfig(_Section):
    """Frozen task network and its label schema."""

    kind: TaskKind = Field(default=TaskKind.TEST_STUB)
    architecture: Literal["vgg16", "lpn", "deeplabv3_resnet50", "torchscript", "stub"] = Field(
        default="stub"
    )
    weights_path: Optional[Path] = Field(default=None)
    num_classes: Optional[int] = Field(default=None, ge=1)
    num_identities: Optional[int] = Field(default=None, ge=1)
    parts: int = Field(default=DEFAULT_LPN_PARTS, ge=1)
    mean: Tuple[float, float, float] = Field(default=IMAGENET_MEAN)
    std: Tuple[float, float, float] = Field(default=IMAGENET_STD)
    ignore_index: int = Field(default=IGNORE_INDEX)
    stub_width: int = Field(default=16, ge=1)

    @model_validator(mode="after")
    def validate_label_schema(self) -> "AdapterConfig":
        """Each task kind needs its label cardinality."""
        if self.kind == TaskKind.GEOLOCATION:
            if self.num_identities is None:
                raise ValueError("Geolocation adapters require num_identities")
        elif self.num_classes is None:
            raise ValueError(f"{self.kind.value} adapters require num_classes")
        if any(s <= 0 for s in self.std):
            raise ValueError(f"Normalization std must be positive, got {self.std}")
        if self.architecture == "torchscript" and self.weights_path is None:
            raise ValueError("TorchScript adapters require weights_path")
        return self


class LossConfig(_Section):
    """Loss weights; L1, perceptual and adversarial terms have unit weight."""

    lambda_task: Optional[float] = Field(default=None, ge=0)
    perceptual_pretrained: bool = Field(default=True)


class OptimConfig(_Section):
    """Adam settings for the generator and both discriminators."""

    lr_generator: float = Field(default=DEFAULT_LEARNING_RATE, gt=0)
    lr_discriminator: float = Field(default=DEFAULT_LEARNING_RATE, gt=0)
    betas: Tuple[float, float] = Field(default=DEFAULT_BETAS)

    @field_validator("betas")
    @classmethod
    def validate_betas(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        """Betas must lie in [0, 1)."""
        if not all(0 <= b < 1 for b in v):
            raise ValueError(f"Adam betas must be in [0, 1), got {v}")
        return v


class DataConfig(_Section):
    """Manifest, seed masks and batch assembly."""

    manifest: Optional[Path] = Field(default=None)
    seed_pool: Optional[Path] = Field(default=None)
    image_size: int = Field(default=DEFAULT_IMAGE_SIZE, gt=0)
    occlusion: OcclusionSpec = Field(default_factory=OcclusionSpec)
    batch_size: int = Field(default=DEFAULT_BATCH_SIZE, ge=1)
    num_workers: int = Field(default=0, ge=0)

    @field_validator("image_size")
    @classmethod
    def validate_image_size(cls, v: int) -> int:
        """The encoder-decoder downsamples by 32."""
        if v % DOWNSAMPLE_FACTOR:
            raise ValueError(f"Image size must be divisible by {DOWNSAMPLE_FACTOR}, got {v}")
        return v


class TrainingConfig(_Section):
    """Training loop settings."""

    max_steps: int = Field(default=10000, ge=1)
    seed: int = Field(default=0, ge=0)
    maskmix_enabled: bool = Field(default=True)
    log_every: int = Field(default=50, ge=1)
    checkpoint_every: int = Field(default=1000, ge=1)
    device: str = Field(default="auto")


class PathsConfig(_Section):
    """Where checkpoints, reports and the loss log are written."""

    checkpoint_dir: Path = Field(default=Path("checkpoints"))
    report_dir: Path = Field(default=Path("reports"))
    loss_log: Optional[Path] = Field(default=None)


class RunConfig(_Section):
    """Main configuration model for a geoinpaint run."""

    version: str = Field(default="1.0")
    data: DataConfig = Field(default_factory=DataConfig)
    model: EncoderDecoderConfig = Field(default_factory=EncoderDecoderConfig)
    discriminator: DiscriminatorConfig = Field(default_factory=DiscriminatorConfig)
    maskmix: MixConfig = Field(default_factory=MixConfig)
    adapter: AdapterConfig = Field(
        default_factory=lambda: AdapterConfig(kind=TaskKind.TEST_STUB, num_classes=7)
    )
    loss: LossConfig = Field(default_factory=LossConfig)
    optim: OptimConfig = Field(default_factory=OptimConfig)
    training: TrainingConfig = Field(default_factory=TrainingConfig)
    paths: PathsConfig = Field(default_factory=PathsConfig)

    @model_validator(mode="after")
    def apply_task_area_range(self) -> "RunConfig":
        """Use the task's occlusion area range unless the file sets either bound."""
        occlusion = self.data.occlusion
        if occlusion.model_fields_set & {"area_lo", "area_hi"}:
            return self
        lo, hi = TASK_AREA_RANGES.get(self.task, RECOGNITION_AREA_RANGE)
        occlusion = occlusion.model_copy(update={"area_lo": lo, "area_hi": hi})
        self.data = self.data.model_copy(update={"occlusion": occlusion})
        return self

    @property
    def task(self) -> TaskKind:
        """Task kind served by the frozen adapter."""
        return self.adapter.kind

    @property
    def task_weight(self) -> float:
        """The task loss weight, falling back to the per-task default."""
        if self.loss.lambda_task is not None:
            return self.loss.lambda_task
        return DEFAULT_TASK_WEIGHTS[self.task]

    @property
    def variant(self) -> TrainingVariant:
        """Ablation variant implied by the task weight and MaskMix flag."""
        if self.task_weight == 0:
            return TrainingVariant.BASELINE
        if not self.training.maskmix_enabled:
            return TrainingVariant.TASK_DRIVEN
        return TrainingVariant.FULL

    @property
    def loss_log_path(self) -> Path:
        """JSON-lines loss log, next to the checkpoints unless configured."""
        return self.paths.loss_log or self.paths.checkpoint_dir / LOSS_LOG_FILE
