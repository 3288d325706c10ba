"""
Adversarial training loop.

Each step performs one update of both discriminators on detached fakes and
then one generator update on
``L1(coarse) + L1(refined) + LPIPS(refined) + adversarial + lambda * task``.
Fakes are mask-composed reconstructions: observed pixels come from the
occluded input and only the hole comes from the generator.
"""

import json
from functools import partial
from pathlib import Path
from typing import Iterable, Optional, Tuple

import torch
from torch import nn
from torch.utils.data import DataLoader
from tqdm import tqdm

from .checkpoint import load_checkpoint, save_checkpoint
from .composition import compose_discriminator_input
from .constants import DIAGNOSTIC_FILE, Split
from .exceptions import TrainingDivergedError, TrainingError
from .logging import bind_step, get_logger, run_context
from .state import TrainState, build_train_state
from ..adapters.base import TaskAdapter
from ..adapters.factory import build_adapter
from ..config.models import RunConfig
from ..data.batch import Batch, make_batch
from ..data.dataset import InpaintingDataset, StepBatchSampler
from ..data.manifest import load_manifest
from ..losses.adversarial import discriminator_losses, generator_adversarial_loss
from ..losses.composite import LossBreakdown, overall_loss, task_loss
from ..losses.reconstruction import PerceptualLoss, l1_loss
from ..utils.determinism import resolve_device, seed_everything

logger = get_logger(__name__)


def set_requires_grad(modules: Iterable[nn.Module], flag: bool) -> None:
    for module in modules:
        for param in module.parameters():
            param.requires_grad_(flag)


def _dump_divergence(
    directory: Optional[Path], step: int, scalars: dict, stage: str
) -> Optional[Path]:
    if directory is None:
        return None
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / DIAGNOSTIC_FILE
    path.write_text(
        json.dumps({"step": step, "stage": stage, "losses": scalars}, indent=2, default=str) + "\n",
        encoding="utf-8",
    )
    return path


def _diverged(
    step: int, scalars: dict, stage: str, diagnostic_dir: Optional[Path]
) -> TrainingDivergedError:
    path = _dump_divergence(diagnostic_dir, step, scalars, stage)
    logger.error(
        "training_diverged", step=step, stage=stage, diagnostic=str(path) if path else None
    )
    return TrainingDivergedError(f"Non-finite {stage} loss at step {step}: {scalars}")


def train_step(
    state: TrainState,
    batch: Batch,
    adapter: TaskAdapter,
    config: RunConfig,
    perceptual: PerceptualLoss,
    diagnostic_dir: Optional[Path] = None,
) -> Tuple[TrainState, LossBreakdown]:
    """
    One discriminator update followed by one generator update.

    Args:
        state: Networks and optimizers; updated in place
        batch: Training batch on the state's device
        adapter: Frozen task adapter
        config: Run configuration (lambda, ...)
        perceptual: LPIPS loss module
        diagnostic_dir: Where ``divergence.json`` goes if a loss is non-finite

    Returns:
        (state with ``step`` incremented, LossBreakdown of this step)

    Raises:
        TrainingDivergedError: If any loss is NaN or infinite
    """
    state.train()
    lambda_task = config.task_weight
    observed, clean, mask = batch.occluded, batch.clean, batch.mask

    out = state.generator(batch.generator_input, mask)
    fake_coarse = compose_discriminator_input(out.coarse, observed, mask)
    fake_refined = compose_discriminator_input(out.refined, observed, mask)

    # discriminators
    set_requires_grad(state.discriminators, True)
    state.opt_d_coarse.zero_grad(set_to_none=True)
    state.opt_d_refined.zero_grad(set_to_none=True)
    d_coarse, d_refined = discriminator_losses(
        state.d_coarse, state.d_refined, observed, clean, fake_coarse, fake_refined
    )
    if not (torch.isfinite(d_coarse) and torch.isfinite(d_refined)):
        raise _diverged(
            state.step,
            {"d_c": float(d_coarse), "d_r": float(d_refined)},
            "discriminator",
            diagnostic_dir,
        )
    (d_coarse + d_refined).backward()
    state.opt_d_coarse.step()
    state.opt_d_refined.step()

    # generator
    set_requires_grad(state.discriminators, False)
    state.opt_generator.zero_grad(set_to_none=True)
    g_adv = generator_adversarial_loss(
        state.d_coarse, state.d_refined, observed, fake_coarse, fake_refined
    )
    if lambda_task > 0:
        task = task_loss(adapter, fake_refined, batch.labels)
    else:
        with torch.no_grad():
            task = task_loss(adapter, fake_refined.detach(), batch.labels)

    breakdown = overall_loss(
        l1_coarse=l1_loss(out.coarse, clean),
        l1_refined=l1_loss(out.refined, clean),
        perceptual_refined=perceptual(out.refined, clean),
        gan_generator=g_adv,
        task=task,
        lambda_task=lambda_task,
        gan_discriminator_coarse=d_coarse.detach(),
        gan_discriminator_refined=d_refined.detach(),
    )
    if not breakdown.is_finite():
        raise _diverged(state.step, breakdown.scalars(), "generator", diagnostic_dir)
    breakdown.total.backward()
    state.opt_generator.step()
    set_requires_grad(state.discriminators, True)

    state.step += 1
    state.update_running(breakdown.scalars())
    return state, breakdown


class Trainer:
    """
    Runs training from a configuration: data stream, adapter, losses, logging
    and checkpoint cadence.
    """

    def __init__(
        self,
        config: RunConfig,
        adapter: Optional[TaskAdapter] = None,
        device: Optional[torch.device] = None,
        show_progress: bool = False,
    ):
        """
        Initialize trainer.

        Args:
            config: Run configuration
            adapter: Pre-built adapter; built from ``config.adapter`` when None
            device: Training device; ``config.training.device`` when None
            show_progress: Display a tqdm progress bar
        """
        self.config = config
        self.device = device or resolve_device(config.training.device)
        self.show_progress = show_progress
        self._adapter = adapter

    def _loader(self, start_step: int) -> DataLoader:
        cfg = self.config
        if cfg.data.manifest is None:
            raise TrainingError("data.manifest is not configured")
        manifest = load_manifest(cfg.data.manifest, cfg.task, cfg.data.image_size)
        dataset = InpaintingDataset(manifest, Split.TRAIN, cfg)
        if len(dataset) == 0:
            raise TrainingError(f"No training records in {cfg.data.manifest}")
        sampler = StepBatchSampler(
            len(dataset),
            cfg.data.batch_size,
            cfg.training.seed,
            cfg.training.max_steps,
            start_step=start_step,
        )
        return DataLoader(
            dataset,
            batch_sampler=sampler,
            collate_fn=partial(make_batch, size=cfg.data.image_size),
            num_workers=cfg.data.num_workers,
        )

    def fit(self, resume_from: Optional[Path] = None) -> TrainState:
        """
        Train until ``training.max_steps``.

        Args:
            resume_from: Checkpoint directory to continue from

        Returns:
            Final TrainState

        Raises:
            TrainingError: If the adapter changed during training or data is missing
            TrainingDivergedError: If a loss becomes non-finite
            CheckpointError: If ``resume_from`` cannot be loaded
        """
        cfg = self.config
        seed_everything(cfg.training.seed)
        adapter = self._adapter or build_adapter(cfg.adapter, device=self.device)
        adapter = adapter.to(self.device)
        # must precede the state: resuming restores the torch RNG
        perceptual = PerceptualLoss(cfg.loss.perceptual_pretrained).to(self.device)

        if resume_from is not None:
            state = load_checkpoint(resume_from, cfg, self.device)
        else:
            state = build_train_state(cfg, self.device)

        checkpoint_dir = cfg.paths.checkpoint_dir
        loss_log = cfg.loss_log_path
        loss_log.parent.mkdir(parents=True, exist_ok=True)
        if resume_from is None and loss_log.exists():
            loss_log.unlink()

        checksum = adapter.checksum()
        with run_context(run=str(checkpoint_dir), variant=cfg.variant.value, step=state.step):
            logger.info(
                "training_started",
                task=cfg.task.value,
                lambda_task=cfg.task_weight,
                maskmix=cfg.training.maskmix_enabled,
                max_steps=cfg.training.max_steps,
                device=str(self.device),
            )
            self._run(state, adapter, perceptual, loss_log)

            if not adapter.is_unchanged_since(checksum):
                raise TrainingError("Task network parameters changed during training")
            logger.info("training_finished")
        return state

    def _run(
        self,
        state: TrainState,
        adapter: TaskAdapter,
        perceptual: PerceptualLoss,
        loss_log: Path,
    ) -> None:
        cfg = self.config
        checkpoint_dir = cfg.paths.checkpoint_dir
        loader = self._loader(state.step)
        with open(loss_log, "a", encoding="utf-8") as log_file, tqdm(
            total=cfg.training.max_steps,
            initial=state.step,
            desc="Training",
            disable=not self.show_progress,
        ) as progress:
            for batch in loader:
                state, breakdown = train_step(
                    state, batch.to(self.device), adapter, cfg, perceptual, checkpoint_dir
                )
                bind_step(state.step)
                log_file.write(json.dumps(breakdown.as_log_record(state.step)) + "\n")
                progress.update(1)

                if state.step % cfg.training.log_every == 0:
                    log_file.flush()
                    logger.info("train_step", **{k: round(v, 5) for k, v in state.running.items()})
                    progress.set_postfix(total=f"{state.running.get('total', 0.0):.4f}")
                if state.step % cfg.training.checkpoint_every == 0:
                    save_checkpoint(state, cfg, checkpoint_dir)

        if state.step % cfg.training.checkpoint_every != 0:
            save_checkpoint(state, cfg, checkpoint_dir)
