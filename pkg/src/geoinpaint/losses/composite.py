"""
Overall generator objective.

``total = (l1_coarse + l1_refined) + perceptual_refined + gan_generator + lambda * task``.
The coarse map contributes only its L1 term here; its adversarial signal comes
through ``gan_generator``, which sums both discriminators.
"""

from dataclasses import asdict, dataclass
from typing import Dict, Optional

import torch

from ..adapters.base import TaskAdapter
from ..data.batch import BatchLabels


@dataclass
class LossBreakdown:
    l1_coarse: torch.Tensor
    l1_refined: torch.Tensor
    perceptual_refined: torch.Tensor
    gan_generator: torch.Tensor
    gan_discriminator_coarse: torch.Tensor
    gan_discriminator_refined: torch.Tensor
    task: torch.Tensor
    total: torch.Tensor

    def as_log_record(self, step: int) -> Dict[str, float]:
        """Flat record for the JSON-lines loss log."""
        return {
            "step": step,
            "l1_c": float(self.l1_coarse),
            "l1_r": float(self.l1_refined),
            "lpips": float(self.perceptual_refined),
            "g_adv": float(self.gan_generator),
            "d_c": float(self.gan_discriminator_coarse),
            "d_r": float(self.gan_discriminator_refined),
            "task": float(self.task),
            "total": float(self.total),
        }

    def scalars(self) -> Dict[str, float]:
        return {name: float(value) for name, value in asdict(self).items()}

    def is_finite(self) -> bool:
        return all(bool(torch.isfinite(value.detach()).all()) for value in asdict(self).values())


def task_loss(adapter: TaskAdapter, composed: torch.Tensor, labels: BatchLabels) -> torch.Tensor:
    """
    Task loss of the frozen adapter on a composed reconstruction.

    Gradients flow to ``composed`` only; adapter parameters never require grad.
    """
    return adapter.loss(composed, labels)


def overall_loss(
    l1_coarse: torch.Tensor,
    l1_refined: torch.Tensor,
    perceptual_refined: torch.Tensor,
    gan_generator: torch.Tensor,
    task: torch.Tensor,
    lambda_task: float,
    gan_discriminator_coarse: Optional[torch.Tensor] = None,
    gan_discriminator_refined: Optional[torch.Tensor] = None,
) -> LossBreakdown:
    """
    Compose the generator objective.

    Discriminator terms are carried for logging only and do not enter ``total``.

    Raises:
        ValueError: If ``lambda_task`` is negative
    """
    if lambda_task < 0:
        raise ValueError(f"lambda_task must be nonnegative, got {lambda_task}")

    total = (l1_coarse + l1_refined) + perceptual_refined + gan_generator
    if lambda_task:
        total = total + lambda_task * task

    zero = torch.zeros((), device=total.device)
    return LossBreakdown(
        l1_coarse=l1_coarse,
        l1_refined=l1_refined,
        perceptual_refined=perceptual_refined,
        gan_generator=gan_generator,
        gan_discriminator_coarse=(
            zero if gan_discriminator_coarse is None else gan_discriminator_coarse
        ),
        gan_discriminator_refined=(
            zero if gan_discriminator_refined is None else gan_discriminator_refined
        ),
        task=task,
        total=total,
    )
