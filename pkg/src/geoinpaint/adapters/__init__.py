"""
Frozen task adapters: classification, cross-view geolocation, segmentation and stand-ins.
"""

from geoinpaint.adapters.base import TaskAdapter
from geoinpaint.adapters.classification import ClassificationAdapter, classification_loss
from geoinpaint.adapters.geolocation import GeolocationAdapter, geolocation_loss
from geoinpaint.adapters.segmentation import SegmentationAdapter, segmentation_loss
from geoinpaint.adapters.factory import build_adapter, build_network
from geoinpaint.adapters.networks import (
    PartNetwork,
    StubClassifier,
    StubSegmenter,
    ring_index,
    ring_pool,
)
from geoinpaint.adapters.stub_training import train_stub_classifier

__all__ = [
    "TaskAdapter",
    "ClassificationAdapter",
    "classification_loss",
    "GeolocationAdapter",
    "geolocation_loss",
    "SegmentationAdapter",
    "segmentation_loss",
    "build_adapter",
    "build_network",
    "PartNetwork",
    "StubClassifier",
    "StubSegmenter",
    "ring_index",
    "ring_pool",
    "train_stub_classifier",
]
