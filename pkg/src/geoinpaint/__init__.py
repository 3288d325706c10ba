"""
geoinpaint - Task-driven inpainting of occluded geoscience images.

A coarse-to-fine generator with coarse and refined patch discriminators learns
to reconstruct occluded regions so that a frozen task network (classifier,
cross-view retrieval network or segmenter) trained on clean images keeps
working on the reconstruction.
"""

__version__ = "1.0.0"
__author__ = "geoinpaint developers"
__license__ = "MIT"

from geoinpaint.core.exceptions import GeoInpaintError

__all__ = ["__version__", "__author__", "__license__", "GeoInpaintError"]
