"""Adaptive wavelet clustering for highly noisy data."""

from .core import NOISE, BoundingBox, Dataset, PointLabeling, compute_bounds, validate
from .estimator import AdaWave
from .evaluator import ami, reassign_noise
from .quantizer import SparseGridMap, quantize
from .synthgen import SynthConfig, generate
from .wavelet import decompose, filter_bank

__all__ = [
    "AdaWave",
    "BoundingBox",
    "Dataset",
    "NOISE",
    "PointLabeling",
    "SparseGridMap",
    "SynthConfig",
    "ami",
    "compute_bounds",
    "decompose",
    "filter_bank",
    "generate",
    "quantize",
    "reassign_noise",
    "validate",
]

__version__ = "0.1.0"
