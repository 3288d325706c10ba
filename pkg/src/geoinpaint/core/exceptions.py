"""
Custom exception classes for geoinpaint.

This module defines the exception hierarchy used throughout the package
to provide clear, specific error handling.
"""


class GeoInpaintError(Exception):
    """Base exception for all geoinpaint errors."""

    pass


class ConfigurationError(GeoInpaintError):
    """Raised when configuration is invalid or cannot be loaded."""

    pass


class ValidationError(GeoInpaintError):
    """Raised when input validation fails."""

    pass


class ShapeMismatchError(ValidationError):
    """Raised when tensors or arrays that must align have different shapes."""

    pass


class MaskError(GeoInpaintError):
    """Raised when an occlusion mask is invalid for the requested operation."""

    pass


class OcclusionSynthesisError(MaskError):
    """Raised when no transformed seed mask satisfies the area constraint."""

    pass


class ManifestError(GeoInpaintError):
    """Raised when a dataset manifest cannot be parsed or fails validation."""

    pass


class DataPipelineError(GeoInpaintError):
    """Raised when samples or batches cannot be assembled."""

    pass


class TaskAdapterError(GeoInpaintError):
    """Raised when a task adapter cannot be built, loaded or applied."""

    pass


class TaskLabelError(TaskAdapterError):
    """Raised when a task label does not fit the adapter's label schema."""

    pass


class MetricError(GeoInpaintError):
    """Raised when a metric cannot be computed from its inputs."""

    pass


class CheckpointError(GeoInpaintError):
    """Raised when a checkpoint is missing, corrupt or incompatible."""

    pass


class TrainingError(GeoInpaintError):
    """Raised when the training loop encounters an error."""

    pass


class TrainingDivergedError(TrainingError):
    """Raised when a training step produces a non-finite loss."""

    pass
