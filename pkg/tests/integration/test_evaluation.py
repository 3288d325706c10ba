"""
Integration tests for evaluation and inference.
"""

import json
import math

import numpy as np
import pytest
import torch

from geoinpaint.core.checkpoint import save_checkpoint
from geoinpaint.core.constants import EvaluationMode
from geoinpaint.core.evaluator import evaluate
from geoinpaint.core.exceptions import CheckpointError, MetricError, ShapeMismatchError
from geoinpaint.core.inpainter import Inpainter, inpaint
from geoinpaint.core.state import build_train_state
from geoinpaint.data.manifest import load_manifest
from geoinpaint.masks import OcclusionMask
from geoinpaint.utils.imageio import load_rgb, save_mask_grid, save_rgb
from tests.conftest import IMAGE_SIZE, TEST_IMAGES, rectangle_mask, scene

pytestmark = pytest.mark.integration


@pytest.fixture
def state(tiny_config):
    torch.manual_seed(0)
    return build_train_state(tiny_config)


class TestEvaluate:
    """Test scoring of the test split."""

    def test_inpainted_mode(self, state, manifest, stub_adapter, tiny_config):
        report = evaluate(state, manifest, stub_adapter, tiny_config)

        assert report.mode == EvaluationMode.INPAINTED
        assert report.sample_count == TEST_IMAGES
        assert math.isfinite(report.psnr)
        assert -1.0 <= report.ssim <= 1.0
        assert report.psnr_coarse is not None
        assert 0.0 <= report.task_metrics["accuracy"] <= 100.0
        assert report.variant == "full"

    def test_occluded_mode(self, manifest, stub_adapter, tiny_config):
        report = evaluate(None, manifest, stub_adapter, tiny_config, mode=EvaluationMode.OCCLUDED)
        assert math.isfinite(report.psnr)
        assert math.isfinite(report.psnr_hole)
        assert report.psnr_coarse is None
        assert "accuracy" in report.task_metrics

    def test_empty_mask_does_not_make_mean_psnr_infinite(
        self, dataset_dir, manifest_path, tiny_config
    ):
        """Test that an exact reconstruction is counted instead of averaged in."""
        empty = np.zeros((IMAGE_SIZE, IMAGE_SIZE), dtype=np.uint8)
        save_mask_grid(empty, dataset_dir / "masks" / "test_0.png")
        data = load_manifest(manifest_path, tiny_config.task, IMAGE_SIZE)

        report = evaluate(None, data, None, tiny_config, mode=EvaluationMode.OCCLUDED)

        assert report.psnr_infinite == 1
        assert math.isfinite(report.psnr)
        assert math.isfinite(report.psnr_hole)
        json.loads(report.to_json(), parse_constant=lambda token: pytest.fail(token))

    def test_clean_mode_has_no_image_metrics(self, manifest, stub_adapter, tiny_config):
        report = evaluate(None, manifest, stub_adapter, tiny_config, mode=EvaluationMode.CLEAN)
        assert report.psnr is None
        assert report.ssim is None
        assert "accuracy" in report.task_metrics

    def test_errors_confined_to_hole(self, state, manifest, tiny_config):
        """Test that visible pixels are exact, so full-image PSNR exceeds hole PSNR."""
        inpainted = evaluate(state, manifest, None, tiny_config)
        occluded = evaluate(None, manifest, None, tiny_config, mode=EvaluationMode.OCCLUDED)

        assert inpainted.task_metrics == {}
        for report in (inpainted, occluded):
            assert report.psnr > report.psnr_hole

    def test_repeated_runs_are_identical(self, state, manifest, stub_adapter, tiny_config):
        first = evaluate(state, manifest, stub_adapter, tiny_config)
        second = evaluate(state, manifest, stub_adapter, tiny_config)
        assert first.to_dict() == second.to_dict()

    def test_never_synthesizes_masks(self, state, manifest, stub_adapter, tiny_config, mocker):
        """Test that evaluation reads baked masks and never mixes or samples new ones."""
        mix = mocker.patch("geoinpaint.data.dataset.maskmix")
        synth = mocker.patch("geoinpaint.data.dataset.sample_occlusion_mask")

        evaluate(state, manifest, stub_adapter, tiny_config)
        evaluate(None, manifest, stub_adapter, tiny_config, mode=EvaluationMode.OCCLUDED)

        mix.assert_not_called()
        synth.assert_not_called()

    def test_checkpoint_path_matches_in_memory_generator(
        self, state, manifest, stub_adapter, tiny_config, temp_dir
    ):
        save_checkpoint(state, tiny_config, temp_dir / "ckpt")

        from_memory = evaluate(state.generator, manifest, stub_adapter, tiny_config)
        from_disk = evaluate(temp_dir / "ckpt", manifest, stub_adapter, tiny_config)

        assert from_disk.psnr == pytest.approx(from_memory.psnr, rel=1e-9)
        assert from_disk.ssim == pytest.approx(from_memory.ssim, rel=1e-9)
        assert from_disk.task_metrics == from_memory.task_metrics

    def test_restores_training_mode(self, state, manifest, tiny_config):
        state.generator.train()
        evaluate(state.generator, manifest, None, tiny_config)
        assert state.generator.training

    def test_missing_inputs(self, manifest, tiny_config, temp_dir):
        with pytest.raises(CheckpointError):
            evaluate(None, manifest, None, tiny_config)
        with pytest.raises(CheckpointError):
            evaluate(temp_dir / "missing", manifest, None, tiny_config)
        with pytest.raises(MetricError):
            evaluate(None, manifest, None, tiny_config, mode=EvaluationMode.CLEAN)


class TestInpainter:
    """Test generator-only inference."""

    def test_empty_mask_returns_input(self, state):
        image = scene(1, 0)
        out = Inpainter(state.generator).inpaint(image, OcclusionMask.zeros(IMAGE_SIZE, IMAGE_SIZE))
        assert np.array_equal(out, image.astype(np.float32))

    def test_visible_pixels_untouched(self, state):
        image = scene(2, 1).astype(np.float32)
        grid = rectangle_mask(IMAGE_SIZE, 10, 12, 20, 24)
        out = Inpainter(state.generator).inpaint(image, grid)

        visible = grid == 0
        assert out.shape == image.shape
        assert np.array_equal(out[visible], image[visible])
        assert float(out.min()) >= 0.0 and float(out.max()) <= 1.0

    def test_rejects_bad_sizes(self, state):
        inpainter = Inpainter(state.generator)
        with pytest.raises(ShapeMismatchError):
            inpainter.inpaint(np.zeros((48, 48, 3)), np.zeros((48, 48)))
        with pytest.raises(ShapeMismatchError):
            inpainter.inpaint(np.zeros((64, 64, 3)), np.zeros((32, 32)))

    def test_from_checkpoint_files(self, state, tiny_config, temp_dir, mocker):
        """Test file-to-file inpainting without ever building a task adapter."""
        build = mocker.patch("geoinpaint.adapters.factory.build_adapter")
        save_checkpoint(state, tiny_config, temp_dir / "ckpt")

        image = scene(0, 3)
        grid = rectangle_mask(IMAGE_SIZE, 4, 4, 16, 16)
        save_rgb(image, temp_dir / "in.png")
        save_mask_grid(grid, temp_dir / "mask.png")

        out_path = Inpainter.from_checkpoint(temp_dir / "ckpt").inpaint_file(
            temp_dir / "in.png", temp_dir / "mask.png", temp_dir / "out" / "filled.png"
        )

        result = load_rgb(out_path)
        original = load_rgb(temp_dir / "in.png")
        assert result.shape == (IMAGE_SIZE, IMAGE_SIZE, 3)
        assert np.array_equal(result[grid == 0], original[grid == 0])
        build.assert_not_called()

    def test_one_shot_matches_inpainter(self, state, tiny_config, temp_dir):
        save_checkpoint(state, tiny_config, temp_dir / "ckpt")
        image = scene(1, 2).astype(np.float32)
        grid = rectangle_mask(IMAGE_SIZE, 20, 20, 12, 30)

        expected = Inpainter(state.generator).inpaint(image, grid)
        assert np.allclose(inpaint(temp_dir / "ckpt", image, grid), expected, atol=1e-6)
