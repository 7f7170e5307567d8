"""Skin segmentation: chrominance-range and hue-Gaussian pixel classifiers.

Default YCbCr skin ranges are literature-standard starting points, not
ground truth; both are plain keyword arguments.  Hue statistics are linear
(non-circular), acceptable while skin hue stays far from the 0/360 wrap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ContractViolation
from .color import rgb_to_hsv, rgb_to_ycbcr
from .image import BitMask, ImageU8

DEFAULT_CB_RANGE = (77, 127)
DEFAULT_CR_RANGE = (133, 173)

# hue carries no information on near-gray pixels
SATURATION_FLOOR = 0.15


@dataclass(frozen=True)
class HueGaussian:
    """Single Gaussian over hue degrees, characterizing the hand color."""

    mean_hue: float
    variance: float

    def __post_init__(self):
        if not 0.0 <= self.mean_hue < 360.0:
            raise ContractViolation(f"HueGaussian: mean_hue {self.mean_hue} outside [0, 360)")
        if self.variance < 0.0:
            raise ContractViolation(f"HueGaussian: negative variance {self.variance}")


def _check_range(name: str, rng: tuple[int, int]) -> tuple[int, int]:
    lo, hi = rng
    if lo > hi:
        raise ContractViolation(f"skin_mask_ycbcr: inverted {name} range [{lo}, {hi}]")
    if lo < 0 or hi > 255:
        raise ContractViolation(f"skin_mask_ycbcr: {name} range [{lo}, {hi}] outside [0, 255]")
    return lo, hi


def skin_mask_ycbcr(img: ImageU8,
                    cb_range: tuple[int, int] = DEFAULT_CB_RANGE,
                    cr_range: tuple[int, int] = DEFAULT_CR_RANGE) -> BitMask:
    """Set a pixel iff its Cb and Cr both fall within the closed ranges."""
    cb_lo, cb_hi = _check_range("Cb", cb_range)
    cr_lo, cr_hi = _check_range("Cr", cr_range)
    ycbcr = rgb_to_ycbcr(img).pixels
    cb = ycbcr[..., 1]
    cr = ycbcr[..., 2]
    bits = (cb >= cb_lo) & (cb <= cb_hi) & (cr >= cr_lo) & (cr <= cr_hi)
    return BitMask(bits)


def fit_hue_gaussian(hues) -> HueGaussian:
    """Arithmetic mean and population variance of hue samples, treated linearly."""
    arr = np.asarray(list(hues), dtype=np.float64)
    if arr.size == 0:
        raise ContractViolation("fit_hue_gaussian: need at least one hue sample")
    mean = float(arr.mean())
    variance = float(((arr - mean) ** 2).mean())
    return HueGaussian(mean_hue=mean % 360.0, variance=variance)


def skin_mask_gaussian(img: ImageU8, model: HueGaussian, k: float) -> BitMask:
    """Set a pixel iff |hue - mean| <= k*sigma and it is saturated enough."""
    if k <= 0:
        raise ContractViolation(f"skin_mask_gaussian: k must be > 0, got {k}")
    hue, saturation, _ = rgb_to_hsv(img)
    tolerance = k * np.sqrt(model.variance)
    bits = (np.abs(hue - model.mean_hue) <= tolerance) & (saturation >= SATURATION_FLOOR)
    return BitMask(bits)


def enhance(img: ImageU8) -> ImageU8:
    """Pre-segmentation enhancement hook; intentionally the identity for now."""
    return img
