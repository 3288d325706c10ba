"""
Networks: encoder-decoder template, coarse-to-fine generator and patch discriminator.
"""

from geoinpaint.models.encoder_decoder import EncoderDecoder, check_spatial_size
from geoinpaint.models.generator import CoarseToFineGenerator, GeneratorOutput
from geoinpaint.models.discriminator import PATCH_SIZE, PatchDiscriminator, receptive_field

__all__ = [
    "EncoderDecoder",
    "check_spatial_size",
    "CoarseToFineGenerator",
    "GeneratorOutput",
    "PATCH_SIZE",
    "PatchDiscriminator",
    "receptive_field",
]
