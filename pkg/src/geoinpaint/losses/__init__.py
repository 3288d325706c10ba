"""
Training losses: L1, LPIPS perceptual, conditional adversarial, task, and their composition.
"""

from geoinpaint.losses.reconstruction import PerceptualLoss, l1_loss
from geoinpaint.losses.adversarial import (
    AdversarialTerms,
    adversarial_losses,
    discriminator_loss,
    discriminator_losses,
    generator_adversarial_loss,
)
from geoinpaint.losses.composite import LossBreakdown, overall_loss, task_loss

__all__ = [
    "PerceptualLoss",
    "l1_loss",
    "AdversarialTerms",
    "adversarial_losses",
    "discriminator_loss",
    "discriminator_losses",
    "generator_adversarial_loss",
    "LossBreakdown",
    "overall_loss",
    "task_loss",
]
