"""
Seeded random streams.

Every sample draws from its own generator keyed by (seed, epoch, index), so
results do not depend on worker count or iteration order.
"""

import numpy as np


def sample_rng(seed: int, epoch: int, index: int) -> np.random.Generator:
    """Generator for one sample of one epoch."""
    return np.random.default_rng(np.random.SeedSequence([seed, epoch, index]))


def epoch_permutation(seed: int, epoch: int, length: int) -> np.ndarray:
    """Deterministic visiting order of a split for one epoch."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, epoch, length, 0x5EED]))
    return rng.permutation(length)
