"""Binary morphology with a fixed 3x3 square structuring element.

Dilation treats out-of-image pixels as background; erosion treats them as
foreground.  That asymmetry makes the pair an adjunction on in-image
masks, which is exactly what guarantees the algebraic laws the rest of
the pipeline relies on: open(m) is a subset of m, m is a subset of
close(m), and both are idempotent -- including for masks touching the
border.  (Erode-with-background would break extensivity of closing at the
border.)
"""

from __future__ import annotations

import numpy as np

from .image import BitMask

_OFFSETS = [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1)]


def _shifted_views(padded: np.ndarray, h: int, w: int):
    for dy, dx in _OFFSETS:
        yield padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]


def erode3x3(mask: BitMask) -> BitMask:
    """Keep a pixel iff all its 3x3 in-image neighbors are set."""
    h, w = mask.bits.shape
    padded = np.pad(mask.bits, 1, constant_values=True)
    out = np.ones_like(mask.bits)
    for view in _shifted_views(padded, h, w):
        out &= view
    return BitMask(out)


def dilate3x3(mask: BitMask) -> BitMask:
    """Set a pixel iff any of its 3x3 in-image neighbors is set."""
    h, w = mask.bits.shape
    padded = np.pad(mask.bits, 1, constant_values=False)
    out = np.zeros_like(mask.bits)
    for view in _shifted_views(padded, h, w):
        out |= view
    return BitMask(out)


def morph_open(mask: BitMask) -> BitMask:
    """Erode then dilate; removes foreground speckle smaller than the element."""
    return dilate3x3(erode3x3(mask))


def morph_close(mask: BitMask) -> BitMask:
    """Dilate then erode; fills background pin-holes smaller than the element."""
    return erode3x3(dilate3x3(mask))
