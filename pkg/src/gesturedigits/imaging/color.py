"""Color space conversions.

YCbCr uses the BT.601 full-range transform with half-up rounding so the
golden values are bit-exact.  HSV is the standard hexcone; achromatic
pixels get hue 0 by convention.
"""

from __future__ import annotations

import numpy as np

from ..errors import ContractViolation
from .image import ImageU8


def _require_rgb(img: ImageU8, op: str) -> np.ndarray:
    if img.channels != 3:
        raise ContractViolation(f"{op}: expected a 3-channel RGB image, got {img.channels} channel(s)")
    return img.pixels.astype(np.float64)


def rgb_to_ycbcr(img: ImageU8) -> ImageU8:
    """BT.601 full-range RGB -> YCbCr, rounded half-up and clamped to [0, 255]."""
    rgb = _require_rgb(img, "rgb_to_ycbcr")
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
    out = np.stack([y, cb, cr], axis=-1)
    out = np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)
    return ImageU8(np.ascontiguousarray(out))


def rgb_to_hsv(img: ImageU8) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-pixel (hue degrees in [0, 360), saturation in [0, 1], value in [0, 1])."""
    rgb = _require_rgb(img, "rgb_to_hsv") / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = np.max(rgb, axis=-1)
    minc = np.min(rgb, axis=-1)
    delta = maxc - minc
    value = maxc
    saturation = np.where(maxc > 0, delta / np.where(maxc > 0, maxc, 1.0), 0.0)

    hue = np.zeros_like(maxc)
    safe = np.where(delta > 0, delta, 1.0)
    r_max = (maxc == r) & (delta > 0)
    g_max = (maxc == g) & (delta > 0) & ~r_max
    b_max = (delta > 0) & ~r_max & ~g_max
    hue = np.where(r_max, ((g - b) / safe) % 6.0, hue)
    hue = np.where(g_max, (b - r) / safe + 2.0, hue)
    hue = np.where(b_max, (r - g) / safe + 4.0, hue)
    hue = hue * 60.0
    hue = np.where(hue >= 360.0, hue - 360.0, hue)
    return hue, saturation, value
