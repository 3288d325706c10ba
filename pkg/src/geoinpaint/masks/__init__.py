"""
Occlusion masks: types, MaskMix augmentation, occlusion synthesis and PNG I/O.
"""

from geoinpaint.masks.types import AugmentOp, OcclusionMask
from geoinpaint.masks.engine import (
    apply_chain,
    apply_op,
    area_ratio,
    fit_to_shape,
    maskmix,
    sample_chains,
    sample_occlusion_mask,
    sample_op,
    sample_weights,
    synthesize_occlusion,
)
from geoinpaint.masks.pool import load_mask, load_seed_pool, save_mask
from geoinpaint.config.models import MixConfig, OcclusionSpec

__all__ = [
    "AugmentOp",
    "OcclusionMask",
    "MixConfig",
    "OcclusionSpec",
    "apply_chain",
    "apply_op",
    "area_ratio",
    "fit_to_shape",
    "maskmix",
    "sample_chains",
    "sample_occlusion_mask",
    "sample_op",
    "sample_weights",
    "synthesize_occlusion",
    "load_mask",
    "load_seed_pool",
    "save_mask",
]
