"""
Utility modules for geoinpaint.

This package contains helpers for parameter digests, image I/O, seeded
random streams and deterministic execution.
"""

from geoinpaint.utils.hash import calculate_module_digest, verify_module_digest
from geoinpaint.utils.imageio import (
    load_class_map,
    load_mask_grid,
    load_rgb,
    resize_grid_nearest,
    save_mask_grid,
    save_rgb,
)
from geoinpaint.utils.seeding import epoch_permutation, sample_rng
from geoinpaint.utils.determinism import (
    deterministic_mode_requested,
    resolve_device,
    seed_everything,
)

__all__ = [
    "calculate_module_digest",
    "verify_module_digest",
    "load_class_map",
    "load_mask_grid",
    "load_rgb",
    "resize_grid_nearest",
    "save_mask_grid",
    "save_rgb",
    "epoch_permutation",
    "sample_rng",
    "deterministic_mode_requested",
    "resolve_device",
    "seed_everything",
]
