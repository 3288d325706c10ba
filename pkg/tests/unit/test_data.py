"""
Unit tests for the data pipeline.

This module tests manifest parsing, sample validation, the dataset, the
step-addressed batch sampler and batch assembly.
"""

import json

import numpy as np
import pytest
import torch

from geoinpaint.core.constants import Split, TaskKind
from geoinpaint.core.exceptions import (
    DataPipelineError,
    ManifestError,
    ShapeMismatchError,
    ValidationError,
)
from geoinpaint.data import (
    InpaintingDataset,
    Sample,
    StepBatchSampler,
    TaskLabel,
    load_manifest,
    make_batch,
    ordered_keys,
)
from geoinpaint.masks import OcclusionMask, area_ratio, load_mask
from geoinpaint.utils.imageio import save_mask_grid

from tests.conftest import IMAGE_SIZE, TEST_IMAGES, TRAIN_IMAGES

TEST_LINE = {"image": "images/test_0.png", "mask": "masks/test_0.png", "label": 0, "split": "test"}


def write_manifest(path, lines):
    path.write_text("\n".join(json.dumps(line) for line in lines) + "\n")
    return path


def make_sample(size=8, label=0, hole=None):
    clean = np.random.default_rng(label).random((size, size, 3)).astype(np.float32)
    grid = np.zeros((size, size), dtype=np.uint8)
    if hole is not None:
        grid[hole] = 1
    mask = OcclusionMask(grid)
    occluded = np.where(grid[..., None] == 1, 0.0, clean).astype(np.float32)
    return Sample(clean, occluded, mask, TaskLabel(kind=TaskKind.TEST_STUB, class_id=label))


class TestManifest:
    """Test JSON-lines manifest parsing and validation."""

    def test_splits_are_counted(self, manifest):
        assert len(manifest.split(Split.TRAIN)) == TRAIN_IMAGES
        assert len(manifest.split(Split.TEST)) == TEST_IMAGES
        assert len(manifest) == TRAIN_IMAGES + TEST_IMAGES

    def test_relative_paths_are_resolved(self, manifest, dataset_dir):
        record = manifest.split(Split.TEST)[0]
        assert record.image.is_absolute()
        assert record.image == (dataset_dir / "images" / "test_0.png").resolve()
        assert record.mask.is_file()
        assert manifest.split(Split.TRAIN)[0].seed_pool.is_dir()

    def test_blank_lines_are_ignored(self, dataset_dir, manifest_path):
        text = manifest_path.read_text()
        path = dataset_dir / "spaced.jsonl"
        path.write_text("\n\n" + text.replace("\n", "\n\n"))
        loaded = load_manifest(path, TaskKind.TEST_STUB, IMAGE_SIZE)
        assert len(loaded) == TRAIN_IMAGES + TEST_IMAGES

    def test_missing_file(self, temp_dir):
        with pytest.raises(ManifestError):
            load_manifest(temp_dir / "missing.jsonl", TaskKind.TEST_STUB, IMAGE_SIZE)

    def test_invalid_json(self, dataset_dir):
        path = dataset_dir / "broken.jsonl"
        path.write_text("{not json\n")
        with pytest.raises(ManifestError, match="line 1"):
            load_manifest(path, TaskKind.TEST_STUB, IMAGE_SIZE)

    def test_unknown_key(self, dataset_dir):
        path = write_manifest(dataset_dir / "extra.jsonl", [{**TEST_LINE, "x": 1}])
        with pytest.raises(ManifestError):
            load_manifest(path, TaskKind.TEST_STUB, IMAGE_SIZE)

    def test_mask_and_seed_pool_are_exclusive(self, dataset_dir):
        path = write_manifest(
            dataset_dir / "both.jsonl",
            [{
                "image": "images/train_0.png",
                "mask": "masks/test_0.png",
                "seed_pool": "../seeds",
                "label": 0,
                "split": "train",
            }],
        )
        with pytest.raises(ManifestError, match="exactly one"):
            load_manifest(path, TaskKind.TEST_STUB, IMAGE_SIZE)

    def test_test_records_need_baked_masks(self, dataset_dir):
        path = write_manifest(
            dataset_dir / "test_pool.jsonl",
            [{"image": "images/test_0.png", "seed_pool": "../seeds", "label": 0, "split": "test"}],
        )
        with pytest.raises(ManifestError, match="pre-baked"):
            load_manifest(path, TaskKind.TEST_STUB, IMAGE_SIZE)

    def test_missing_image(self, dataset_dir):
        path = write_manifest(
            dataset_dir / "missing_image.jsonl",
            [{"image": "images/nope.png", "mask": "masks/test_0.png", "label": 0, "split": "test"}],
        )
        with pytest.raises(ManifestError, match="image not found"):
            load_manifest(path, TaskKind.TEST_STUB, IMAGE_SIZE)

    def test_images_in_both_splits(self, dataset_dir):
        path = write_manifest(
            dataset_dir / "leak.jsonl", [{**TEST_LINE, "split": "train"}, TEST_LINE]
        )
        with pytest.raises(ManifestError, match="both splits"):
            load_manifest(path, TaskKind.TEST_STUB, IMAGE_SIZE)

    def test_classification_label_must_be_id(self, dataset_dir):
        path = write_manifest(dataset_dir / "bad_label.jsonl", [{**TEST_LINE, "label": -1}])
        with pytest.raises(ManifestError):
            load_manifest(path, TaskKind.CLASSIFICATION, IMAGE_SIZE)

    def test_geolocation_label(self, dataset_dir):
        line = {
            "image": "images/test_0.png",
            "mask": "masks/test_0.png",
            "label": {"identity": 3, "satellite": "images/test_1.png"},
            "split": "test",
        }
        path = write_manifest(dataset_dir / "geo.jsonl", [line])
        loaded = load_manifest(path, TaskKind.GEOLOCATION, IMAGE_SIZE)
        label = loaded.records[0].label
        assert label.identity == 3
        assert label.satellite.is_absolute()

        with pytest.raises(ManifestError):
            load_manifest(path, TaskKind.CLASSIFICATION, IMAGE_SIZE)

    def test_geolocation_needs_satellite_file(self, dataset_dir):
        line = {
            "image": "images/test_0.png",
            "mask": "masks/test_0.png",
            "label": {"identity": 0, "satellite": "images/none.png"},
            "split": "test",
        }
        path = write_manifest(dataset_dir / "geo_missing.jsonl", [line])
        with pytest.raises(ManifestError, match="satellite"):
            load_manifest(path, TaskKind.GEOLOCATION, IMAGE_SIZE)

    def test_segmentation_label(self, dataset_dir):
        save_mask_grid(np.eye(IMAGE_SIZE, dtype=np.uint8), dataset_dir / "labels" / "map.png")
        line = {**TEST_LINE, "label": "labels/map.png"}
        path = write_manifest(dataset_dir / "seg.jsonl", [line])
        loaded = load_manifest(path, TaskKind.SEGMENTATION, IMAGE_SIZE)
        assert loaded.records[0].label == str((dataset_dir / "labels" / "map.png").resolve())

        bad = write_manifest(dataset_dir / "seg_bad.jsonl", [dict(line, label="labels/none.png")])
        with pytest.raises(ManifestError, match="class map"):
            load_manifest(bad, TaskKind.SEGMENTATION, IMAGE_SIZE)


class TestSample:
    """Test the sample invariants."""

    def test_valid_sample(self):
        sample = make_sample(hole=(slice(2, 5), slice(2, 5)))
        assert sample.size == (8, 8)

    def test_visible_pixels_must_match(self):
        sample = make_sample()
        tampered = sample.occluded.copy()
        tampered[0, 0, 0] += 0.5
        with pytest.raises(ValidationError):
            Sample(sample.clean, tampered, sample.mask, sample.label)

    def test_hole_pixels_may_differ(self):
        sample = make_sample(hole=(slice(0, 2), slice(0, 2)))
        changed = sample.occluded.copy()
        changed[0, 0] = 0.7
        Sample(sample.clean, changed, sample.mask, sample.label)

    def test_shape_mismatch(self):
        sample = make_sample()
        with pytest.raises(ShapeMismatchError):
            Sample(sample.clean, sample.occluded, OcclusionMask.zeros(4, 4), sample.label)
        with pytest.raises(ShapeMismatchError):
            Sample(sample.clean, sample.occluded[:4], sample.mask, sample.label)


class TestDataset:
    """Test sample construction from a manifest split."""

    def test_train_sample(self, manifest, tiny_config):
        dataset = InpaintingDataset(manifest, Split.TRAIN, tiny_config)
        sample = dataset[0]
        assert sample.clean.shape == (IMAGE_SIZE, IMAGE_SIZE, 3)
        assert sample.mask.occluded_pixels > 0
        hole = sample.mask.grid.astype(bool)
        assert np.all(sample.occluded[hole] == 0.0)
        assert sample.label.class_id == 0

    def test_same_key_same_sample(self, manifest, tiny_config):
        dataset = InpaintingDataset(manifest, Split.TRAIN, tiny_config)
        assert dataset[(3, 2)].mask == dataset[(3, 2)].mask
        assert dataset[2].mask == dataset[(0, 2)].mask

    def test_epochs_draw_new_masks(self, manifest, tiny_config):
        dataset = InpaintingDataset(manifest, Split.TRAIN, tiny_config)
        masks = {dataset[(epoch, 1)].mask for epoch in range(5)}
        assert len(masks) > 1

    def test_placed_masks_respect_area_without_maskmix(self, manifest, tiny_config):
        config = tiny_config.model_copy(
            update={"training": tiny_config.training.model_copy(update={"maskmix_enabled": False})}
        )
        dataset = InpaintingDataset(manifest, Split.TRAIN, config)
        spec = config.data.occlusion
        for epoch in range(3):
            for i in range(len(dataset)):
                assert spec.area_lo <= area_ratio(dataset[(epoch, i)].mask) <= spec.area_hi

    def test_test_split_uses_baked_mask(self, manifest, tiny_config, mocker):
        spy = mocker.patch("geoinpaint.data.dataset.maskmix")
        dataset = InpaintingDataset(manifest, Split.TEST, tiny_config)
        record = dataset.records[1]
        assert dataset[1].mask == load_mask(record.mask, (IMAGE_SIZE, IMAGE_SIZE))
        spy.assert_not_called()

    def test_maskmix_applied_during_training(self, manifest, tiny_config, mocker):
        from geoinpaint.masks.engine import maskmix

        spy = mocker.patch("geoinpaint.data.dataset.maskmix", side_effect=maskmix)
        dataset = InpaintingDataset(manifest, Split.TRAIN, tiny_config)
        dataset[0]
        assert spy.call_count == 1

    def test_maskmix_disabled(self, manifest, tiny_config, mocker):
        spy = mocker.patch("geoinpaint.data.dataset.maskmix")
        config = tiny_config.model_copy(
            update={"training": tiny_config.training.model_copy(update={"maskmix_enabled": False})}
        )
        InpaintingDataset(manifest, Split.TRAIN, config)[0]
        spy.assert_not_called()

    def test_geolocation_labels(self, dataset_dir, tiny_config):
        line = {
            "image": "images/test_0.png",
            "mask": "masks/test_0.png",
            "label": {"identity": 1, "satellite": "images/test_1.png"},
            "split": "test",
        }
        path = write_manifest(dataset_dir / "geo.jsonl", [line])
        manifest = load_manifest(path, TaskKind.GEOLOCATION, IMAGE_SIZE)
        sample = InpaintingDataset(manifest, Split.TEST, tiny_config)[0]
        assert sample.label.identity == 1
        assert sample.label.satellite.shape == (IMAGE_SIZE, IMAGE_SIZE, 3)

    def test_segmentation_labels(self, dataset_dir, tiny_config):
        grid = np.zeros((IMAGE_SIZE, IMAGE_SIZE), dtype=np.uint8)
        grid[:, IMAGE_SIZE // 2:] = 2
        from PIL import Image

        (dataset_dir / "labels").mkdir()
        Image.fromarray(grid).save(dataset_dir / "labels" / "map.png")
        line = {**TEST_LINE, "label": "labels/map.png"}
        path = write_manifest(dataset_dir / "seg.jsonl", [line])
        manifest = load_manifest(path, TaskKind.SEGMENTATION, IMAGE_SIZE)
        sample = InpaintingDataset(manifest, Split.TEST, tiny_config)[0]
        assert sample.label.class_map.dtype == np.int64
        assert set(np.unique(sample.label.class_map)) == {0, 2}


class TestStepBatchSampler:
    """Test step-addressed batches."""

    def test_each_epoch_visits_every_index(self):
        sampler = StepBatchSampler(dataset_length=6, batch_size=2, seed=0, max_steps=6)
        keys = [key for batch in sampler for key in batch]
        for epoch in (0, 1):
            assert sorted(i for e, i in keys if e == epoch) == list(range(6))

    def test_batches_can_span_epochs(self):
        sampler = StepBatchSampler(dataset_length=5, batch_size=2, seed=0, max_steps=3)
        assert [e for e, _ in sampler.keys_for_step(1)] == [0, 0]
        assert [e for e, _ in sampler.keys_for_step(2)] == [0, 1]
        assert [e for e, _ in sampler.keys_for_step(3)] == [1, 1]
        assert [e for e, _ in StepBatchSampler(5, 3, 0, 2).keys_for_step(1)] == [0, 0, 1]

    def test_resumed_stream_matches(self):
        full = list(StepBatchSampler(7, 3, seed=4, max_steps=10))
        resumed = list(StepBatchSampler(7, 3, seed=4, max_steps=10, start_step=6))
        assert resumed == full[6:]
        assert len(StepBatchSampler(7, 3, seed=4, max_steps=10, start_step=6)) == 4

    def test_seed_changes_order(self):
        a = [StepBatchSampler(20, 4, seed=0, max_steps=5).keys_for_step(s) for s in range(5)]
        b = [StepBatchSampler(20, 4, seed=1, max_steps=5).keys_for_step(s) for s in range(5)]
        assert a != b

    def test_empty_split(self):
        with pytest.raises(ValueError):
            StepBatchSampler(0, 2, 0, 10)

    def test_ordered_keys(self):
        assert list(ordered_keys(3)) == [(0, 0), (0, 1), (0, 2)]


class TestMakeBatch:
    """Test batch assembly."""

    def test_shapes_and_channels(self):
        samples = [make_sample(label=i, hole=(slice(1, 4), slice(2, 6))) for i in range(3)]
        batch = make_batch(samples, size=8)
        assert batch.clean.shape == (3, 3, 8, 8)
        assert batch.mask.shape == (3, 1, 8, 8)
        assert batch.generator_input.shape == (3, 4, 8, 8)
        assert batch.labels.class_ids.tolist() == [0, 1, 2]
        assert len(batch) == 3

    def test_visible_pixels_exact(self):
        samples = [make_sample(size=16, label=i, hole=(slice(3, 9), slice(0, 5))) for i in range(2)]
        batch = make_batch(samples, size=16)
        visible = batch.mask == 0
        visible = visible.expand_as(batch.clean)
        assert torch.equal(batch.occluded[visible], batch.clean[visible])
        assert torch.all(batch.occluded[~visible] == 0)

    def test_resize_keeps_mask_binary(self):
        samples = [make_sample(size=12, hole=(slice(2, 7), slice(3, 9)))]
        batch = make_batch(samples, size=32)
        assert batch.clean.shape[-2:] == (32, 32)
        assert set(torch.unique(batch.mask).tolist()) <= {0.0, 1.0}

    def test_generator_input_last_channel_is_mask(self):
        batch = make_batch([make_sample(hole=(slice(0, 3), slice(0, 3)))], size=8)
        assert torch.equal(batch.generator_input[:, 3:], batch.mask)

    def test_empty(self):
        with pytest.raises(DataPipelineError):
            make_batch([], size=8)

    def test_to_device(self):
        batch = make_batch([make_sample()], size=8).to(torch.device("cpu"))
        assert batch.labels.class_ids.device.type == "cpu"
