"""Vertex trichotomy correspondence filtering."""

from ._core import (
    AffineTransform,
    FilterResult,
    Scene,
    VtmatchError,
    estimate_affine,
    generate_scene,
    metrics,
    orient,
    ransac,
    rfvtm,
    vtm,
)

__all__ = [
    "AffineTransform",
    "FilterResult",
    "Scene",
    "VtmatchError",
    "estimate_affine",
    "generate_scene",
    "metrics",
    "orient",
    "ransac",
    "rfvtm",
    "vtm",
]
