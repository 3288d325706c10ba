"""
Conditional adversarial losses for the coarse and refined discriminators.

Discriminators output logits. Each discriminator minimizes
``BCE(D(I, I_gt), 1) + BCE(D(I, fake), 0)`` on detached fakes, which is the
negated log-likelihood objective; the generator minimizes the non-saturating
surrogate ``BCE(D(I, fake), 1)`` summed over both discriminators. All terms
are means over the patch grid and batch.
"""

from dataclasses import dataclass
from typing import Tuple

import torch
import torch.nn.functional as F
from torch import nn


@dataclass
class AdversarialTerms:
    generator: torch.Tensor
    disc_coarse: torch.Tensor
    disc_refined: torch.Tensor


def _bce(logits: torch.Tensor, target: float) -> torch.Tensor:
    return F.binary_cross_entropy_with_logits(logits, torch.full_like(logits, target))


def discriminator_loss(
    discriminator: nn.Module,
    observed: torch.Tensor,
    real: torch.Tensor,
    fake: torch.Tensor,
) -> torch.Tensor:
    """Real/fake loss of one discriminator; ``fake`` is detached here."""
    real_logits = discriminator(observed, real)
    fake_logits = discriminator(observed, fake.detach())
    return _bce(real_logits, 1.0) + _bce(fake_logits, 0.0)


def discriminator_losses(
    d_coarse: nn.Module,
    d_refined: nn.Module,
    observed: torch.Tensor,
    real: torch.Tensor,
    fake_coarse: torch.Tensor,
    fake_refined: torch.Tensor,
) -> Tuple[torch.Tensor, torch.Tensor]:
    """(coarse term, refined term) for the discriminator update."""
    return (
        discriminator_loss(d_coarse, observed, real, fake_coarse),
        discriminator_loss(d_refined, observed, real, fake_refined),
    )


def generator_adversarial_loss(
    d_coarse: nn.Module,
    d_refined: nn.Module,
    observed: torch.Tensor,
    fake_coarse: torch.Tensor,
    fake_refined: torch.Tensor,
) -> torch.Tensor:
    """Non-saturating generator surrogate summed over both discriminators."""
    return _bce(d_coarse(observed, fake_coarse), 1.0) + _bce(d_refined(observed, fake_refined), 1.0)


def adversarial_losses(
    d_coarse: nn.Module,
    d_refined: nn.Module,
    observed: torch.Tensor,
    real: torch.Tensor,
    fake_coarse: torch.Tensor,
    fake_refined: torch.Tensor,
) -> AdversarialTerms:
    """
    All three adversarial terms on one batch.

    Args:
        d_coarse, d_refined: Patch discriminators returning logits
        observed: Occluded input image I (the condition)
        real: Ground-truth image I_gt
        fake_coarse, fake_refined: Mask-composed coarse and refined reconstructions

    Returns:
        AdversarialTerms(generator, disc_coarse, disc_refined)
    """
    disc_coarse, disc_refined = discriminator_losses(
        d_coarse, d_refined, observed, real, fake_coarse, fake_refined
    )
    generator = generator_adversarial_loss(d_coarse, d_refined, observed, fake_coarse, fake_refined)
    return AdversarialTerms(generator=generator, disc_coarse=disc_coarse, disc_refined=disc_refined)
