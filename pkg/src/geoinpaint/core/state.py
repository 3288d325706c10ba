"""
Mutable training state: networks, optimizers and counters.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional

import torch
from torch import nn

from ..config.models import RunConfig
from ..models.discriminator import PatchDiscriminator
from ..models.generator import CoarseToFineGenerator

# weight of the newest value in the running loss averages
RUNNING_AVERAGE_WEIGHT = 0.1


@dataclass
class TrainState:
    """Everything a resumed run needs besides the config and the data."""

    generator: CoarseToFineGenerator
    d_coarse: PatchDiscriminator
    d_refined: PatchDiscriminator
    opt_generator: torch.optim.Optimizer
    opt_d_coarse: torch.optim.Optimizer
    opt_d_refined: torch.optim.Optimizer
    step: int = 0
    running: Dict[str, float] = field(default_factory=dict)

    @property
    def discriminators(self) -> Iterable[nn.Module]:
        return (self.d_coarse, self.d_refined)

    def train(self) -> "TrainState":
        for module in (self.generator, self.d_coarse, self.d_refined):
            module.train()
        return self

    def eval(self) -> "TrainState":
        for module in (self.generator, self.d_coarse, self.d_refined):
            module.eval()
        return self

    def update_running(self, scalars: Dict[str, float]) -> None:
        for name, value in scalars.items():
            previous = self.running.get(name)
            self.running[name] = (
                value
                if previous is None
                else (1 - RUNNING_AVERAGE_WEIGHT) * previous + RUNNING_AVERAGE_WEIGHT * value
            )


def build_train_state(config: RunConfig, device: Optional[torch.device] = None) -> TrainState:
    """Fresh networks and Adam optimizers for ``config``."""
    device = device or torch.device("cpu")
    generator = CoarseToFineGenerator(config.model).to(device)
    d_coarse = PatchDiscriminator(config.discriminator).to(device)
    d_refined = PatchDiscriminator(config.discriminator).to(device)

    optim = config.optim
    return TrainState(
        generator=generator,
        d_coarse=d_coarse,
        d_refined=d_refined,
        opt_generator=torch.optim.Adam(
            generator.parameters(), lr=optim.lr_generator, betas=optim.betas
        ),
        opt_d_coarse=torch.optim.Adam(
            d_coarse.parameters(), lr=optim.lr_discriminator, betas=optim.betas
        ),
        opt_d_refined=torch.optim.Adam(
            d_refined.parameters(), lr=optim.lr_discriminator, betas=optim.betas
        ),
    )
