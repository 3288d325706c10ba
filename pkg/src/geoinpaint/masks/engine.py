"""
Occlusion mask synthesis and MaskMix augmentation.

Geometric operations are applied as inverse affine maps about the grid centre
with nearest-neighbor sampling, so every intermediate mask stays binary and
content moved out of frame is dropped (filled with 0).
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from .types import AugmentOp, OcclusionMask
from ..config.models import MixConfig, OcclusionSpec
from ..core.composition import compose_occluded
from ..core.constants import AugmentKind
from ..core.exceptions import MaskError, OcclusionSynthesisError
from ..core.logging import get_logger
from ..utils.imageio import resize_grid_nearest

logger = get_logger(__name__)

Chain = Sequence[AugmentOp]
MixWeights = Tuple[float, float, float, float]

_AUGMENT_KINDS = (AugmentKind.TRANSLATE, AugmentKind.SHEAR, AugmentKind.ROTATE)


def _rotation_xy(angle_deg: float) -> np.ndarray:
    theta = np.deg2rad(angle_deg)
    c, s = np.cos(theta), np.sin(theta)
    # counter-clockwise on screen, where y grows downwards
    return np.array([[c, s], [-s, c]])


def _affine_remap(
    grid: np.ndarray, forward_xy: np.ndarray, shift_xy: Tuple[float, float] = (0.0, 0.0)
) -> np.ndarray:
    """
    Warp a binary grid by ``p' = A (p - c) + c + t`` in (x, y) pixel coordinates.

    Raises:
        MaskError: If the transform is singular
    """
    a, b = forward_xy[0]
    c, d = forward_xy[1]
    forward_rc = np.array([[d, c], [b, a]], dtype=np.float64)
    shift_rc = np.array([shift_xy[1], shift_xy[0]], dtype=np.float64)
    centre = (np.array(grid.shape, dtype=np.float64) - 1.0) / 2.0

    try:
        inverse = np.linalg.inv(forward_rc)
    except np.linalg.LinAlgError as e:
        raise MaskError(f"Singular mask transform: {forward_xy.tolist()}") from e

    # snap round-off so exact quarter turns and integer shifts land on pixel centres
    inverse = np.round(inverse, 12)
    offset = np.round(centre - inverse @ (centre + shift_rc), 9)

    warped = ndimage.affine_transform(
        grid.astype(np.uint8),
        inverse,
        offset=offset,
        output_shape=grid.shape,
        order=0,
        mode="constant",
        cval=0,
    )
    return (warped > 0).astype(np.uint8)


def _op_matrix(op: AugmentOp) -> Tuple[np.ndarray, Tuple[float, float]]:
    if op.kind == AugmentKind.TRANSLATE:
        return np.eye(2), (op.params[0], op.params[1])
    if op.kind == AugmentKind.SHEAR:
        shear_x, shear_y = op.params
        return np.array([[1.0, shear_x], [shear_y, 1.0]]), (0.0, 0.0)
    return _rotation_xy(op.params[0]), (0.0, 0.0)


def apply_op(mask: OcclusionMask, op: AugmentOp) -> OcclusionMask:
    """
    Apply one geometric operation to a mask.

    Args:
        mask: Binary mask
        op: translate, shear or rotate

    Returns:
        Binary mask of the same size

    Examples:
        >>> m = OcclusionMask(np.eye(4, dtype=np.uint8))
        >>> apply_op(m, AugmentOp.identity()) == m
        True
    """
    matrix, shift = _op_matrix(op)
    if op.kind == AugmentKind.TRANSLATE and shift == (0.0, 0.0):
        return mask
    return OcclusionMask(_affine_remap(mask.grid, matrix, shift))


def apply_chain(mask: OcclusionMask, chain: Chain) -> OcclusionMask:
    """Apply operations left to right: ``A3(A2(A1(mask)))``."""
    for op in chain:
        mask = apply_op(mask, op)
    return mask


def sample_op(
    kind: AugmentKind, cfg: MixConfig, shape: Tuple[int, int], rng: np.random.Generator
) -> AugmentOp:
    """Draw parameters for one operation from the configured ranges."""
    if kind == AugmentKind.TRANSLATE:
        max_dy = int(cfg.translate_fraction * shape[0])
        max_dx = int(cfg.translate_fraction * shape[1])
        return AugmentOp.translate(
            int(rng.integers(-max_dx, max_dx + 1)), int(rng.integers(-max_dy, max_dy + 1))
        )
    if kind == AugmentKind.SHEAR:
        return AugmentOp.shear(
            rng.uniform(-cfg.shear_range, cfg.shear_range),
            rng.uniform(-cfg.shear_range, cfg.shear_range),
        )
    return AugmentOp.rotate(rng.uniform(-cfg.rotate_degrees, cfg.rotate_degrees))


def sample_chains(
    cfg: MixConfig, shape: Tuple[int, int], rng: np.random.Generator
) -> List[List[AugmentOp]]:
    """Draw ``branch_count`` chains of ``chain_depth`` random operations."""
    chains = []
    for _ in range(cfg.branch_count):
        chain = []
        for _ in range(cfg.chain_depth):
            kind = _AUGMENT_KINDS[int(rng.integers(len(_AUGMENT_KINDS)))]
            chain.append(sample_op(kind, cfg, shape, rng))
        chains.append(chain)
    return chains


def sample_weights(cfg: MixConfig, rng: np.random.Generator) -> MixWeights:
    """
    Mixing weights (w1, w2, w3, w4).

    Branch weights are ``m * Dirichlet(alpha)`` and the seed keeps ``1 - m`` with
    ``m ~ Beta(beta_alpha, beta_alpha)``, so the four weights sum to one.
    """
    if cfg.weights is not None:
        return cfg.weights
    branch = rng.dirichlet([cfg.dirichlet_alpha] * cfg.branch_count)
    m = float(rng.beta(cfg.beta_alpha, cfg.beta_alpha))
    w1, w2, w3 = (float(m * w) for w in branch)
    return (w1, w2, w3, 1.0 - m)


def maskmix(
    seed: OcclusionMask,
    cfg: MixConfig,
    rng: Optional[np.random.Generator] = None,
    chains: Optional[Sequence[Chain]] = None,
    weights: Optional[MixWeights] = None,
) -> OcclusionMask:
    """
    Mix a seed mask with three transformed copies of itself and threshold.

    ``M = Phi{ w4 * Ms + sum_i w_i * A3_i(A2_i(A1_i(Ms))) }`` where Phi sets
    values at or above ``cfg.threshold`` to 1 and everything else to 0.

    Args:
        seed: Binary seed mask with at least one occluded pixel
        cfg: Mixing configuration
        rng: Random stream; defaults to one seeded with ``cfg.rng_seed``
        chains: Explicit branch chains instead of sampled ones
        weights: Explicit (w1, w2, w3, w4) instead of sampled ones

    Returns:
        Augmented binary mask of the seed's size

    Raises:
        MaskError: If the seed is empty or the branch count is wrong
    """
    if seed.occluded_pixels == 0:
        raise MaskError("MaskMix needs a seed mask with a nonzero occluded area")

    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    if chains is None:
        chains = sample_chains(cfg, seed.shape, rng)
    if weights is None:
        weights = sample_weights(cfg, rng)

    if len(chains) != cfg.branch_count:
        raise MaskError(f"Expected {cfg.branch_count} branches, got {len(chains)}")

    mixed = weights[3] * seed.grid.astype(np.float64)
    for w, chain in zip(weights[:3], chains):
        if w:
            mixed += w * apply_chain(seed, chain).grid

    return OcclusionMask((mixed >= cfg.threshold).astype(np.uint8))


def area_ratio(mask: OcclusionMask) -> float:
    """Fraction of occluded pixels."""
    return mask.occluded_pixels / float(mask.height * mask.width)


def fit_to_shape(mask: OcclusionMask, shape: Tuple[int, int]) -> OcclusionMask:
    """Nearest-neighbor resize of a seed mask to the target image size."""
    if mask.shape == tuple(shape):
        return mask
    return OcclusionMask(resize_grid_nearest(mask.grid, shape))


def sample_occlusion_mask(
    seed_pool: Sequence[OcclusionMask],
    spec: OcclusionSpec,
    shape: Tuple[int, int],
    rng: np.random.Generator,
) -> OcclusionMask:
    """
    Place a randomly chosen seed mask with a random resize, rotation and shift.

    The resize factor aims at an area drawn uniformly from ``[area_lo, area_hi]``
    (clipped to ``spec.scale_range``); attempts whose area after cropping falls
    outside ``[area_lo, area_hi]`` are discarded.

    Args:
        seed_pool: Candidate seed masks
        spec: Area constraint and transform ranges
        shape: (height, width) of the target image
        rng: Random stream

    Returns:
        Mask whose area ratio lies within ``[spec.area_lo, spec.area_hi]``

    Raises:
        MaskError: If the pool is empty
        OcclusionSynthesisError: If no attempt satisfies the area constraint
    """
    if not seed_pool:
        raise MaskError("Seed mask pool is empty")

    height, width = shape
    for attempt in range(spec.max_attempts):
        seed = fit_to_shape(seed_pool[int(rng.integers(len(seed_pool)))], shape)
        seed_area = area_ratio(seed)
        target = rng.uniform(spec.area_lo, spec.area_hi)
        angle = rng.uniform(-spec.rotate_degrees, spec.rotate_degrees)
        dx = rng.uniform(-spec.translate_fraction, spec.translate_fraction) * width
        dy = rng.uniform(-spec.translate_fraction, spec.translate_fraction) * height
        if seed_area == 0:
            continue

        scale = float(np.clip(np.sqrt(target / seed_area), *spec.scale_range))
        grid = _affine_remap(seed.grid, scale * _rotation_xy(angle), (round(dx), round(dy)))
        candidate = OcclusionMask(grid)
        ratio = area_ratio(candidate)
        if spec.area_lo <= ratio <= spec.area_hi:
            return candidate
        logger.debug("occlusion_rejected", attempt=attempt, area_ratio=round(ratio, 4))

    raise OcclusionSynthesisError(
        f"No placement within area [{spec.area_lo}, {spec.area_hi}] "
        f"after {spec.max_attempts} attempts"
    )


def synthesize_occlusion(
    image: np.ndarray,
    seed_pool: Sequence[OcclusionMask],
    spec: OcclusionSpec,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, OcclusionMask]:
    """
    Occlude an image with a placed seed mask.

    Args:
        image: H x W x 3 array in [0, 1]
        seed_pool: Candidate seed masks
        spec: Area constraint and transform ranges
        rng: Random stream

    Returns:
        (occluded image with holes set to 0, mask)

    Raises:
        OcclusionSynthesisError: If no placement satisfies the area constraint
    """
    mask = sample_occlusion_mask(seed_pool, spec, image.shape[:2], rng)
    return compose_occluded(image, mask), mask
