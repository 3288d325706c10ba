"""
Data pipeline: manifests, samples, datasets and batch assembly.
"""

from geoinpaint.data.manifest import (
    DatasetManifest,
    GeolocationLabel,
    ManifestRecord,
    load_manifest,
)
from geoinpaint.data.sample import Sample, TaskLabel
from geoinpaint.data.dataset import InpaintingDataset, StepBatchSampler, ordered_keys
from geoinpaint.data.batch import Batch, BatchLabels, make_batch
from geoinpaint.core.composition import compose_occluded

__all__ = [
    "DatasetManifest",
    "GeolocationLabel",
    "ManifestRecord",
    "load_manifest",
    "Sample",
    "TaskLabel",
    "InpaintingDataset",
    "StepBatchSampler",
    "ordered_keys",
    "Batch",
    "BatchLabels",
    "make_batch",
    "compose_occluded",
]
