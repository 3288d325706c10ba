"""
Unit tests for the generator and discriminators.

This module tests the encoder-decoder template, the coarse-to-fine residual
generator and the patch discriminator geometry.
"""

import pytest
import torch

from geoinpaint.config.models import DiscriminatorConfig, EncoderDecoderConfig
from geoinpaint.core.exceptions import ShapeMismatchError
from geoinpaint.models import CoarseToFineGenerator, EncoderDecoder, PatchDiscriminator
from geoinpaint.models.discriminator import PATCH_SIZE, receptive_field


@pytest.fixture
def small_model_config():
    return EncoderDecoderConfig(
        base_width=4, stage_blocks=(1, 1, 1, 1, 1, 1), pretrained_encoder=False
    )


@pytest.fixture
def generator(small_model_config):
    torch.manual_seed(0)
    return CoarseToFineGenerator(small_model_config).eval()


def generator_input(n=2, size=64, seed=0):
    g = torch.Generator().manual_seed(seed)
    image = torch.rand(n, 3, size, size, generator=g)
    mask = (torch.rand(n, 1, size, size, generator=g) > 0.7).float()
    occluded = torch.where(mask.bool(), torch.zeros_like(image), image)
    return torch.cat([occluded, mask], dim=1), mask


class TestEncoderDecoder:
    """Test the U-shaped template."""

    def test_six_skip_connections(self, small_model_config):
        net = EncoderDecoder(small_model_config)
        assert len(net.encoder) == 6
        assert len(net.decoder) == 6
        assert net.skip_pairs == [(5, 0), (4, 1), (3, 2), (2, 3), (1, 4), (0, 5)]

    def test_every_decoder_consumes_its_skip(self, small_model_config):
        net = EncoderDecoder(small_model_config).eval()
        widths = small_model_config.stage_widths
        seen = {}

        def record(j):
            def hook(module, inputs):
                seen[j] = inputs[0].shape[1]
            return hook

        for j, decoder in enumerate(net.decoder):
            decoder.register_forward_pre_hook(record(j))
        with torch.no_grad():
            net(torch.rand(1, 4, 64, 64))

        previous = widths[-1]
        for j, (enc_idx, _) in enumerate(net.skip_pairs):
            assert seen[j] == previous + widths[enc_idx]
            previous = widths[enc_idx - 1] if enc_idx > 0 else widths[0]

    def test_output_resolution(self, small_model_config):
        net = EncoderDecoder(small_model_config).eval()
        with torch.no_grad():
            out = net(torch.rand(1, 4, 96, 64))
        assert out.shape == (1, 3, 96, 64)

    def test_rejects_size_not_divisible_by_32(self, small_model_config):
        net = EncoderDecoder(small_model_config)
        with pytest.raises(ShapeMismatchError):
            net(torch.rand(1, 4, 48, 64))

    def test_stage_widths(self):
        widths = EncoderDecoderConfig(pretrained_encoder=False).stage_widths
        assert widths == (64, 128, 256, 512, 512, 512)

    def test_pretrained_layout_mismatch_falls_back(self, small_model_config):
        net = EncoderDecoder(small_model_config)
        assert net.load_pretrained_encoder() is False


class TestGenerator:
    """Test the coarse-to-fine generator."""

    @pytest.mark.parametrize("size", [32, 64, 96])
    def test_preserves_spatial_size(self, generator, size):
        x, mask = generator_input(size=size)
        with torch.no_grad():
            out = generator(x, mask)
        for tensor in (out.coarse, out.residual, out.refined):
            assert tensor.shape == (2, 3, size, size)

    def test_coarse_in_unit_range(self, generator):
        x, mask = generator_input()
        with torch.no_grad():
            coarse = generator.coarse_forward(x)
        assert float(coarse.min()) >= 0.0
        assert float(coarse.max()) <= 1.0

    def test_zeroed_refinement_reproduces_coarse(self, generator):
        with torch.no_grad():
            generator.refine.head.weight.zero_()
            generator.refine.head.bias.zero_()
            x, mask = generator_input()
            out = generator(x, mask)
        assert torch.equal(out.refined, out.coarse)

    def test_refined_is_coarse_plus_residual(self, generator):
        x, mask = generator_input(seed=3)
        with torch.no_grad():
            out = generator(x, mask)
        assert torch.allclose(out.refined - out.coarse, out.residual, atol=1e-6)

    def test_refinement_sees_coarse_and_mask(self, small_model_config):
        gen = CoarseToFineGenerator(small_model_config)
        assert gen.refine.config.in_channels == 4
        assert gen.coarse.config.in_channels == 4

    def test_rejects_wrong_channels(self, generator):
        with pytest.raises(ShapeMismatchError):
            generator.coarse_forward(torch.rand(1, 3, 64, 64))

    def test_rejects_mismatched_mask(self, generator):
        x, _ = generator_input()
        with pytest.raises(ShapeMismatchError):
            generator(x, torch.zeros(2, 1, 32, 32))

    def test_rejects_size_not_divisible_by_32(self, generator):
        with pytest.raises(ShapeMismatchError):
            generator(torch.rand(1, 4, 40, 40), torch.zeros(1, 1, 40, 40))


class TestPatchDiscriminator:
    """Test the conditional patch discriminator."""

    def test_256_input_gives_30x30_grid(self):
        d = PatchDiscriminator(DiscriminatorConfig(base_width=4)).eval()
        with torch.no_grad():
            out = d(torch.rand(1, 3, 256, 256), torch.rand(1, 3, 256, 256))
        assert out.shape == (1, 1, 30, 30)

    def test_receptive_field(self):
        assert PATCH_SIZE == 70
        assert receptive_field([1]) == 4
        assert receptive_field([2, 2], kernel=3) == 7

    def test_output_cell_sees_one_patch(self):
        """Test that the gradient of one logit covers exactly PATCH_SIZE input rows and columns."""
        torch.manual_seed(0)
        d = PatchDiscriminator(DiscriminatorConfig(base_width=4)).eval()
        candidate = torch.rand(1, 3, 128, 128, requires_grad=True)
        d(torch.rand(1, 3, 128, 128), candidate)[0, 0, 7, 7].backward()

        touched = candidate.grad[0].abs().sum(dim=0) > 0
        rows = touched.any(dim=1).nonzero().flatten()
        cols = touched.any(dim=0).nonzero().flatten()
        assert int(rows[-1] - rows[0]) + 1 == PATCH_SIZE
        assert int(cols[-1] - cols[0]) + 1 == PATCH_SIZE

    def test_outputs_unbounded_logits(self):
        d = PatchDiscriminator(DiscriminatorConfig(base_width=4)).eval()
        with torch.no_grad():
            out = d(torch.rand(2, 3, 64, 64), torch.rand(2, 3, 64, 64))
        assert out.shape == (2, 1, 6, 6)
        assert out.dtype == torch.float32

    def test_rejects_mismatched_inputs(self):
        d = PatchDiscriminator(DiscriminatorConfig(base_width=4))
        with pytest.raises(ShapeMismatchError):
            d(torch.rand(1, 3, 64, 64), torch.rand(1, 3, 32, 32))

    def test_rejects_wrong_channels(self):
        d = PatchDiscriminator(DiscriminatorConfig(base_width=4))
        with pytest.raises(ShapeMismatchError):
            d(torch.rand(1, 1, 64, 64), torch.rand(1, 1, 64, 64))
