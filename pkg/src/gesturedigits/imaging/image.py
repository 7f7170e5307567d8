"""Image, mask and box value types, resizing, and PNG persistence."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import ContractViolation


@dataclass(frozen=True)
class ImageU8:
    """Interleaved 8-bit image; pixels shaped (height, width, channels), channels 1 or 3."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.dtype != np.uint8:
            raise ContractViolation(f"ImageU8: dtype must be uint8, got {p.dtype}")
        if p.ndim != 3 or p.shape[2] not in (1, 3):
            raise ContractViolation(f"ImageU8: pixels must be (h, w, 1|3), got shape {p.shape}")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise ContractViolation(f"ImageU8: empty image {p.shape}")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @staticmethod
    def from_array(arr) -> "ImageU8":
        a = np.asarray(arr, dtype=np.uint8)
        if a.ndim == 2:
            a = a[:, :, None]
        return ImageU8(np.ascontiguousarray(a))


@dataclass(frozen=True)
class BitMask:
    """One boolean per pixel, row-major, shaped (height, width)."""

    bits: np.ndarray

    def __post_init__(self):
        if self.bits.dtype != np.bool_ or self.bits.ndim != 2:
            raise ContractViolation(
                f"BitMask: bits must be a 2-D bool array, got {self.bits.dtype} "
                f"shape {self.bits.shape}")

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def count(self) -> int:
        return int(self.bits.sum())


@dataclass(frozen=True, order=True)
class PixelBox:
    """Inclusive pixel-space rectangle."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ContractViolation(f"PixelBox: degenerate corners {self}")
        if self.x_min < 0 or self.y_min < 0:
            raise ContractViolation(f"PixelBox: negative coordinates {self}")

    @property
    def width(self) -> int:
        return self.x_max - self.x_min + 1

    @property
    def height(self) -> int:
        return self.y_max - self.y_min + 1

    def area(self) -> int:
        return self.width * self.height


def resize(img: ImageU8, new_w: int, new_h: int, mode: str = "bilinear") -> ImageU8:
    """Resample to new_w x new_h.

    nearest picks source pixel floor(dst * src/new); bilinear samples at
    half-pixel centers with clamped borders and rounds half-up.
    """
    if new_w < 1 or new_h < 1:
        raise ContractViolation(f"resize: target size {new_w}x{new_h} must be >= 1")
    h, w = img.height, img.width
    if (new_w, new_h) == (w, h):
        return ImageU8(img.pixels.copy())
    src = img.pixels.astype(np.float64)
    if mode == "nearest":
        xs = np.floor(np.arange(new_w) * (w / new_w)).astype(int)
        ys = np.floor(np.arange(new_h) * (h / new_h)).astype(int)
        out = src[ys[:, None], xs[None, :]]
    elif mode == "bilinear":
        xs = (np.arange(new_w) + 0.5) * (w / new_w) - 0.5
        ys = (np.arange(new_h) + 0.5) * (h / new_h) - 0.5
        xs = np.clip(xs, 0, w - 1)
        ys = np.clip(ys, 0, h - 1)
        x0 = np.floor(xs).astype(int)
        y0 = np.floor(ys).astype(int)
        x1 = np.minimum(x0 + 1, w - 1)
        y1 = np.minimum(y0 + 1, h - 1)
        fx = (xs - x0)[None, :, None]
        fy = (ys - y0)[:, None, None]
        top = src[y0[:, None], x0[None, :]] * (1 - fx) + src[y0[:, None], x1[None, :]] * fx
        bot = src[y1[:, None], x0[None, :]] * (1 - fx) + src[y1[:, None], x1[None, :]] * fx
        out = top * (1 - fy) + bot * fy
    else:
        raise ContractViolation(f"resize: unknown mode '{mode}'")
    out = np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)
    return ImageU8(np.ascontiguousarray(out))


def crop(img: ImageU8, box: PixelBox) -> ImageU8:
    """Cut the inclusive box out of the image."""
    if box.x_max >= img.width or box.y_max >= img.height:
        raise ContractViolation(f"crop: box {box} exceeds image {img.width}x{img.height}")
    return ImageU8(np.ascontiguousarray(
        img.pixels[box.y_min:box.y_max + 1, box.x_min:box.x_max + 1]))


def load_png(path) -> ImageU8:
    """Read an 8-bit grayscale or RGB PNG."""
    with Image.open(path) as im:
        if im.mode == "L":
            arr = np.asarray(im, dtype=np.uint8)[:, :, None]
        else:
            arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    return ImageU8(np.ascontiguousarray(arr))


def save_png(img: ImageU8, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    if img.channels == 1:
        Image.fromarray(img.pixels[:, :, 0], mode="L").save(path, format="PNG")
    else:
        Image.fromarray(img.pixels, mode="RGB").save(path, format="PNG")


def load_mask_png(path) -> BitMask:
    """Read a mask stored as 8-bit gray; any nonzero sample is foreground."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("L"), dtype=np.uint8)
    return BitMask(arr > 0)


def save_mask_png(mask: BitMask, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    arr = np.where(mask.bits, 255, 0).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path, format="PNG")
