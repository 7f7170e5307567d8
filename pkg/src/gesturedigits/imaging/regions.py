"""Connected components, principal-axis orientation, and Hu moment features."""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from ..errors import ContractViolation, NoHandRegionError
from .image import BitMask, PixelBox


def connected_components(mask: BitMask) -> list[tuple[int, PixelBox, np.ndarray]]:
    """4-connected components as (size, bbox, component bitmap) tuples."""
    bits = mask.bits
    h, w = bits.shape
    seen = np.zeros_like(bits)
    components = []
    for sy, sx in zip(*np.nonzero(bits)):
        if seen[sy, sx]:
            continue
        comp = np.zeros_like(bits)
        queue = deque([(int(sy), int(sx))])
        seen[sy, sx] = True
        size = 0
        x_min = x_max = int(sx)
        y_min = y_max = int(sy)
        while queue:
            y, x = queue.popleft()
            comp[y, x] = True
            size += 1
            x_min, x_max = min(x_min, x), max(x_max, x)
            y_min, y_max = min(y_min, y), max(y_max, y)
            for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
                if 0 <= ny < h and 0 <= nx < w and bits[ny, nx] and not seen[ny, nx]:
                    seen[ny, nx] = True
                    queue.append((ny, nx))
        components.append((size, PixelBox(x_min, y_min, x_max, y_max), comp))
    return components


def largest_component_bbox(mask: BitMask) -> PixelBox:
    """Tight box of the largest 4-connected component.

    Size ties go to the component whose box has the smallest (y_min, x_min).
    """
    best = largest_component(mask)
    return best[1]


def largest_component(mask: BitMask) -> tuple[int, PixelBox, BitMask]:
    """Largest component with its size and bitmap; raises NoHandRegionError when empty."""
    components = connected_components(mask)
    if not components:
        raise NoHandRegionError("mask has no set pixels")
    size, box, comp = max(
        components, key=lambda c: (c[0], -c[1].y_min, -c[1].x_min))
    return size, box, BitMask(comp)


def orientation(mask: BitMask) -> float:
    """Principal-axis angle in degrees within [-90, 90).

    Derived from second central moments as 0.5*atan2(2*mu11, mu20 - mu02),
    with x = column and y = row.  Exact symmetry returns 0.
    """
    ys, xs = np.nonzero(mask.bits)
    if xs.size < 2:
        raise ContractViolation(f"orientation: need >= 2 set pixels, got {xs.size}")
    x = xs - xs.mean()
    y = ys - ys.mean()
    mu20 = float(np.sum(x * x))
    mu02 = float(np.sum(y * y))
    mu11 = float(np.sum(x * y))
    angle = 0.5 * math.degrees(math.atan2(2.0 * mu11, mu20 - mu02))
    if angle >= 90.0:
        angle -= 180.0
    return angle


def hu_moments(mask: BitMask) -> np.ndarray:
    """The seven Hu invariant moments of a binary shape."""
    ys, xs = np.nonzero(mask.bits)
    if xs.size == 0:
        raise ContractViolation("hu_moments: empty mask")
    x = xs - xs.mean()
    y = ys - ys.mean()

    def mu(p: int, q: int) -> float:
        return float(np.sum(x ** p * y ** q))

    m00 = float(xs.size)

    def eta(p: int, q: int) -> float:
        return mu(p, q) / m00 ** (1.0 + (p + q) / 2.0)

    n20, n02, n11 = eta(2, 0), eta(0, 2), eta(1, 1)
    n30, n03 = eta(3, 0), eta(0, 3)
    n21, n12 = eta(2, 1), eta(1, 2)

    h1 = n20 + n02
    h2 = (n20 - n02) ** 2 + 4.0 * n11 ** 2
    h3 = (n30 - 3.0 * n12) ** 2 + (3.0 * n21 - n03) ** 2
    h4 = (n30 + n12) ** 2 + (n21 + n03) ** 2
    h5 = ((n30 - 3.0 * n12) * (n30 + n12)
          * ((n30 + n12) ** 2 - 3.0 * (n21 + n03) ** 2)
          + (3.0 * n21 - n03) * (n21 + n03)
          * (3.0 * (n30 + n12) ** 2 - (n21 + n03) ** 2))
    h6 = ((n20 - n02) * ((n30 + n12) ** 2 - (n21 + n03) ** 2)
          + 4.0 * n11 * (n30 + n12) * (n21 + n03))
    h7 = ((3.0 * n21 - n03) * (n30 + n12)
          * ((n30 + n12) ** 2 - 3.0 * (n21 + n03) ** 2)
          - (n30 - 3.0 * n12) * (n21 + n03)
          * (3.0 * (n30 + n12) ** 2 - (n21 + n03) ** 2))
    return np.array([h1, h2, h3, h4, h5, h6, h7])
