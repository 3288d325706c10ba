"""
Integration tests for the training loop.

These tests run real generator, discriminator, LPIPS and adapter networks at
64x64 on the CPU.
"""

import json
import math
from pathlib import Path

import pytest
import structlog
import torch

from geoinpaint.core.checkpoint import load_checkpoint, load_generator, read_meta, save_checkpoint
from geoinpaint.core.composition import compose_discriminator_input
from geoinpaint.core.constants import Split
from geoinpaint.core.exceptions import CheckpointError, TrainingDivergedError, TrainingError
from geoinpaint.core.state import build_train_state
from geoinpaint.core.trainer import Trainer, train_step
from geoinpaint.data.batch import make_batch
from geoinpaint.data.dataset import InpaintingDataset, StepBatchSampler
from geoinpaint.losses import PerceptualLoss
from geoinpaint.losses.composite import task_loss

pytestmark = pytest.mark.integration


@pytest.fixture(scope="module")
def perceptual():
    torch.manual_seed(0)
    return PerceptualLoss(pretrained=False)


@pytest.fixture
def deterministic(monkeypatch):
    monkeypatch.setenv("GEOINPAINT_DETERMINISTIC", "1")
    yield
    torch.use_deterministic_algorithms(False)


def batch_for_step(config, manifest, step=0):
    dataset = InpaintingDataset(manifest, Split.TRAIN, config)
    sampler = StepBatchSampler(
        len(dataset), config.data.batch_size, config.training.seed, config.training.max_steps
    )
    return make_batch([dataset[key] for key in sampler.keys_for_step(step)], config.data.image_size)


def with_updates(config, **sections):
    """Copy of ``config`` with some fields of some sections replaced."""
    update = {
        name: getattr(config, name).model_copy(update=fields) for name, fields in sections.items()
    }
    return config.model_copy(update=update)


def base_terms(breakdown):
    return sum(
        float(v)
        for v in (
            breakdown.l1_coarse,
            breakdown.l1_refined,
            breakdown.perceptual_refined,
            breakdown.gan_generator,
        )
    )


class TestTrainStep:
    """Test a single adversarial update."""

    def test_step_counter_and_finite_losses(self, tiny_config, manifest, stub_adapter, perceptual):
        torch.manual_seed(0)
        state = build_train_state(tiny_config)
        batch = batch_for_step(tiny_config, manifest)

        state, breakdown = train_step(state, batch, stub_adapter, tiny_config, perceptual)

        assert state.step == 1
        assert breakdown.is_finite()
        assert set(state.running) >= {"total", "task", "l1_refined"}

    def test_updates_generator_and_discriminators(
        self, tiny_config, manifest, stub_adapter, perceptual
    ):
        torch.manual_seed(0)
        state = build_train_state(tiny_config)
        modules = {"g": state.generator, "dc": state.d_coarse, "dr": state.d_refined}
        before = {
            name: next(module.parameters()).detach().clone() for name, module in modules.items()
        }
        batch = batch_for_step(tiny_config, manifest)
        train_step(state, batch, stub_adapter, tiny_config, perceptual)

        for name, module in modules.items():
            assert not torch.equal(next(module.parameters()), before[name])

    def test_adapter_stays_frozen(self, tiny_config, manifest, stub_adapter, perceptual):
        """Test that 100 updates leave the task network bit-identical."""
        torch.manual_seed(0)
        state = build_train_state(tiny_config)
        checksum = stub_adapter.checksum()

        for step in range(100):
            batch = batch_for_step(tiny_config, manifest, step)
            state, _ = train_step(state, batch, stub_adapter, tiny_config, perceptual)

        assert stub_adapter.checksum() == checksum
        assert all(p.grad is None for p in stub_adapter.parameters())

    @pytest.mark.parametrize("lambda_task", [0.0, 0.5, 5.0])
    def test_task_term_is_weighted(
        self, tiny_config, manifest, stub_adapter, perceptual, lambda_task
    ):
        """Test total - (L1 + LPIPS + adversarial) == lambda * task."""
        config = with_updates(tiny_config, loss={"lambda_task": lambda_task})
        torch.manual_seed(0)
        state = build_train_state(config)
        batch = batch_for_step(config, manifest)
        _, breakdown = train_step(state, batch, stub_adapter, config, perceptual)

        assert math.isfinite(float(breakdown.task))
        assert float(breakdown.total) - base_terms(breakdown) == pytest.approx(
            lambda_task * float(breakdown.task), rel=1e-5, abs=1e-6
        )

    def test_task_gradient_matches_finite_difference(self, tiny_config, manifest, stub_adapter):
        """Test the task gradient w.r.t. a generator weight against central differences."""
        torch.manual_seed(0)
        state = build_train_state(tiny_config)
        generator = state.generator.double().eval()
        adapter = stub_adapter.double()
        batch = batch_for_step(tiny_config, manifest)
        occluded, mask = batch.occluded.double(), batch.mask.double()
        generator_input = torch.cat([occluded, mask], dim=1)

        def objective():
            out = generator(generator_input, mask)
            composed = compose_discriminator_input(out.refined, occluded, mask)
            return task_loss(adapter, composed, batch.labels)

        bias = generator.refine.head.bias
        generator.zero_grad(set_to_none=True)
        objective().backward()
        analytic = float(bias.grad[0])

        h = 1e-5
        with torch.no_grad():
            bias[0] += h
            upper = float(objective())
            bias[0] -= 2 * h
            lower = float(objective())
            bias[0] += h
        numeric = (upper - lower) / (2 * h)

        assert analytic == pytest.approx(numeric, rel=1e-3, abs=1e-9)

    def test_divergence_raises_and_dumps_diagnostics(
        self, tiny_config, manifest, stub_adapter, perceptual, temp_dir, mocker
    ):
        mocker.patch("geoinpaint.core.trainer.l1_loss", return_value=torch.tensor(float("nan")))
        state = build_train_state(tiny_config)

        with pytest.raises(TrainingDivergedError):
            batch = batch_for_step(tiny_config, manifest)
            train_step(state, batch, stub_adapter, tiny_config, perceptual, temp_dir)

        diagnostic = json.loads((temp_dir / "divergence.json").read_text())
        assert diagnostic["stage"] == "generator"
        assert diagnostic["step"] == 0
        assert state.step == 0


class TestTrainer:
    """Test full runs with checkpoints and loss logs."""

    def test_fit_writes_checkpoint_and_log(self, tiny_config):
        state = Trainer(tiny_config).fit()

        assert state.step == 4
        checkpoint_dir = tiny_config.paths.checkpoint_dir
        meta = read_meta(checkpoint_dir)
        assert meta["step"] == 4
        assert meta["image_size"] == 64
        assert meta["variant"] == "full"

        lines = tiny_config.loss_log_path.read_text().strip().splitlines()
        records = [json.loads(line) for line in lines]
        assert [r["step"] for r in records] == [1, 2, 3, 4]
        assert list(records[0]) == [
            "step", "l1_c", "l1_r", "lpips", "g_adv", "d_c", "d_r", "task", "total"
        ]

        generator, snapshot, _ = load_generator(checkpoint_dir)
        assert not generator.training
        assert snapshot.training.max_steps == 4

    def test_changed_task_network_fails_the_run(self, tiny_config, stub_adapter, mocker):
        mocker.patch.object(stub_adapter, "is_unchanged_since", return_value=False)
        with pytest.raises(TrainingError):
            Trainer(tiny_config, adapter=stub_adapter).fit()
        assert structlog.contextvars.get_contextvars() == {}

    def test_resume_matches_uninterrupted_run(self, tiny_config, temp_dir, deterministic):
        """Test that stopping at step 2 and resuming reproduces steps 3 and 4."""
        full = with_updates(tiny_config, paths={"checkpoint_dir": temp_dir / "full"})
        Trainer(full).fit()

        first_half = with_updates(
            tiny_config,
            paths={"checkpoint_dir": temp_dir / "split"},
            training={"max_steps": 2},
        )
        Trainer(first_half).fit()
        second_half = with_updates(tiny_config, paths={"checkpoint_dir": temp_dir / "split"})
        state = Trainer(second_half).fit(resume_from=temp_dir / "split")

        assert state.step == 4
        expected = [json.loads(line) for line in full.loss_log_path.read_text().splitlines()]
        resumed = [json.loads(line) for line in second_half.loss_log_path.read_text().splitlines()]
        assert [r["step"] for r in resumed] == [1, 2, 3, 4]
        for want, got in zip(expected[2:], resumed[2:]):
            for key in want:
                assert got[key] == pytest.approx(want[key], rel=1e-6, abs=1e-9)

    def test_checkpoint_round_trip(self, tiny_config, temp_dir):
        torch.manual_seed(0)
        state = build_train_state(tiny_config)
        state.step = 17
        state.running = {"total": 1.5}
        save_checkpoint(state, tiny_config, temp_dir / "ckpt")

        restored = load_checkpoint(temp_dir / "ckpt", tiny_config)
        assert restored.step == 17
        assert restored.running == {"total": 1.5}
        original = state.generator.state_dict()
        for name, value in restored.generator.state_dict().items():
            assert torch.equal(value, original[name])

    def test_failed_save_keeps_previous_checkpoint(self, tiny_config, temp_dir, mocker):
        """Test that a write error part way through leaves the last good checkpoint loadable."""
        directory = temp_dir / "ckpt"
        directory.mkdir()
        (directory / "losses.jsonl").write_text('{"step": 1}\n')
        torch.manual_seed(0)
        state = build_train_state(tiny_config)
        state.step = 2
        save_checkpoint(state, tiny_config, directory)
        saved = {k: v.clone() for k, v in state.generator.state_dict().items()}

        real_save = torch.save

        def failing_save(obj, path, *args, **kwargs):
            if Path(path).name == "optimizers.pt":
                raise RuntimeError("disk full")
            real_save(obj, path, *args, **kwargs)

        mocker.patch("torch.save", side_effect=failing_save)
        with torch.no_grad():
            for param in state.generator.parameters():
                param.add_(1.0)
        state.step = 4
        with pytest.raises(CheckpointError):
            save_checkpoint(state, tiny_config, directory)
        mocker.stopall()

        assert read_meta(directory)["step"] == 2
        restored = load_checkpoint(directory, tiny_config)
        assert restored.step == 2
        for name, value in restored.generator.state_dict().items():
            assert torch.equal(value, saved[name])
        assert not (directory / ".staging").exists()
        assert (directory / "losses.jsonl").read_text() == '{"step": 1}\n'

    def test_checkpoint_image_size_mismatch(self, tiny_config, temp_dir):
        save_checkpoint(build_train_state(tiny_config), tiny_config, temp_dir / "ckpt")
        bigger = with_updates(tiny_config, data={"image_size": 96})
        with pytest.raises(CheckpointError):
            load_checkpoint(temp_dir / "ckpt", bigger)

    def test_corrupt_checkpoint(self, tiny_config, temp_dir):
        directory = temp_dir / "ckpt"
        save_checkpoint(build_train_state(tiny_config), tiny_config, directory)

        (directory / "generator.pt").write_bytes(b"truncated")
        with pytest.raises(CheckpointError):
            load_generator(directory)

        (directory / "meta.json").write_text("{")
        with pytest.raises(CheckpointError):
            read_meta(directory)

    def test_missing_checkpoint(self, temp_dir, tiny_config):
        with pytest.raises(CheckpointError):
            load_checkpoint(temp_dir / "nowhere", tiny_config)
