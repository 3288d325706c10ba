"""
Image quality metrics on [0, 1] images (H x W or H x W x C arrays).
"""

import math

import numpy as np
from skimage.metrics import structural_similarity

from ..core.exceptions import MetricError, ShapeMismatchError

DATA_RANGE = 1.0
SSIM_SIGMA = 1.5
SSIM_WINDOW = 11


def _as_pair(a: np.ndarray, b: np.ndarray):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"Images differ in shape: {a.shape} vs {b.shape}")
    return a, b


def _psnr_from_mse(mse: float) -> float:
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(DATA_RANGE**2 / mse)


def psnr(reconstruction: np.ndarray, target: np.ndarray) -> float:
    """
    Peak signal-to-noise ratio in dB with MAX = 1.

    Returns ``math.inf`` for identical images.
    """
    a, b = _as_pair(reconstruction, target)
    return _psnr_from_mse(float(np.mean((a - b) ** 2)))


def psnr_hole(reconstruction: np.ndarray, target: np.ndarray, mask: np.ndarray) -> float:
    """
    PSNR over occluded pixels only.

    Args:
        reconstruction, target: H x W x C images
        mask: H x W binary grid (1 = occluded)

    Returns:
        dB, ``math.inf`` on a perfect fill and ``math.nan`` for an empty mask
    """
    a, b = _as_pair(reconstruction, target)
    hole = np.asarray(getattr(mask, "grid", mask)).astype(bool)
    if hole.shape != a.shape[:2]:
        raise ShapeMismatchError(f"Mask {hole.shape} does not match image {a.shape[:2]}")
    if not hole.any():
        return math.nan
    return _psnr_from_mse(float(np.mean((a[hole] - b[hole]) ** 2)))


def ssim(reconstruction: np.ndarray, target: np.ndarray) -> float:
    """
    Mean structural similarity with an 11x11 Gaussian window (sigma 1.5).

    Uses C1 = (0.01 L)^2 and C2 = (0.03 L)^2 with L = 1 and population
    statistics; color channels are averaged.

    Raises:
        MetricError: If either side is smaller than the window
    """
    a, b = _as_pair(reconstruction, target)
    if min(a.shape[:2]) < SSIM_WINDOW:
        raise MetricError(
            f"Image {a.shape[:2]} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window"
        )
    return float(
        structural_similarity(
            a,
            b,
            data_range=DATA_RANGE,
            gaussian_weights=True,
            sigma=SSIM_SIGMA,
            use_sample_covariance=False,
            channel_axis=-1 if a.ndim == 3 else None,
        )
    )
