"""Seeded synthetic hand-gesture renderer.

Each sample is an ellipse palm plus finger_count capsule fingers in a
skin-tone color (inside the default YCbCr skin ranges) over a bluish
non-skin background, with seeded rotation/translation/scale jitter.  The
generator owns the ground truth: the returned mask is exactly the set of
skin-colored pixels and the annotation is the mask's tight bounding box.
Identical (spec, seed) pairs render bit-identical images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ContractViolation
from ..imaging.image import BitMask, ImageU8, save_png
from .labelmap import build_label_map, write_label_map
from .voc import voc_to_yolo
from .yolo import YoloAnnotation, write_yolo

# finger-count class names, index == finger count
GESTURE_NAMES = ("zero", "one", "two", "three", "four", "five")

# all verified inside Cb [77,127] x Cr [133,173] after BT.601 conversion
SKIN_TONES = (
    (172, 124, 90),
    (196, 140, 110),
    (148, 102, 70),
    (210, 160, 132),
    (160, 118, 96),
)

# bluish palettes; Cb lands well above 127 so nothing here reads as skin
BACKGROUND_BASES = (
    (70, 90, 140),
    (52, 76, 124),
    (88, 108, 156),
)


@dataclass(frozen=True)
class SyntheticGestureSpec:
    finger_count: int
    canvas_w: int = 96
    canvas_h: int = 96
    rotation_jitter_deg: float = 10.0
    translation_jitter: float = 0.05
    scale_jitter: float = 0.10
    background_style: int = 0

    def __post_init__(self):
        if not 0 <= self.finger_count <= 5:
            raise ContractViolation(f"finger_count {self.finger_count} outside [0, 5]")
        if self.canvas_w < 32 or self.canvas_h < 32:
            raise ContractViolation(
                f"canvas {self.canvas_w}x{self.canvas_h} below the 32x32 minimum")
        if self.background_style not in (0, 1, 2):
            raise ContractViolation(f"unknown background style {self.background_style}")


def _render_background(spec: SyntheticGestureSpec, rng: np.random.Generator) -> np.ndarray:
    h, w = spec.canvas_h, spec.canvas_w
    base = np.array(BACKGROUND_BASES[int(rng.integers(0, len(BACKGROUND_BASES)))], dtype=np.float64)
    img = np.tile(base, (h, w, 1))
    if spec.background_style == 1:
        ramp = np.linspace(-18.0, 18.0, h)[:, None, None]
        img = img + ramp
    elif spec.background_style == 2:
        yy, xx = np.mgrid[0:h, 0:w]
        checker = (((yy // 8) + (xx // 8)) % 2).astype(np.float64) * 14.0
        img = img + checker[:, :, None]
    return np.clip(img, 0, 255)


def _hand_mask(spec: SyntheticGestureSpec, rng: np.random.Generator) -> np.ndarray:
    h, w = spec.canvas_h, spec.canvas_w
    rot = math.radians(rng.uniform(-spec.rotation_jitter_deg, spec.rotation_jitter_deg))
    tx = rng.uniform(-spec.translation_jitter, spec.translation_jitter) * w
    ty = rng.uniform(-spec.translation_jitter, spec.translation_jitter) * h
    scale = rng.uniform(1.0 - spec.scale_jitter, 1.0 + spec.scale_jitter)

    cx = w / 2.0 + tx
    cy = 0.60 * h + ty
    palm_a = 0.17 * w * scale
    palm_b = 0.21 * h * scale
    finger_len = 0.30 * h * scale
    finger_r = 0.045 * w * scale

    yy, xx = np.mgrid[0:h, 0:w]
    px = xx - cx
    py = yy - cy
    cos_r, sin_r = math.cos(rot), math.sin(rot)
    u = px * cos_r + py * sin_r
    v = -px * sin_r + py * cos_r
    mask = (u / palm_a) ** 2 + (v / palm_b) ** 2 <= 1.0

    k = spec.finger_count
    if k > 0:
        rel_angles = [0.0] if k == 1 else list(np.linspace(-40.0, 40.0, k))
        for rel in rel_angles:
            phi = math.radians(-90.0 + rel) + rot
            dx, dy = math.cos(phi), math.sin(phi)
            bx = cx + 0.70 * palm_b * dx
            by = cy + 0.70 * palm_b * dy
            ex = bx + finger_len * dx
            ey = by + finger_len * dy
            # distance from each pixel to the finger's core segment
            sx = xx - bx
            sy = yy - by
            seg_len2 = (ex - bx) ** 2 + (ey - by) ** 2
            t = np.clip((sx * (ex - bx) + sy * (ey - by)) / seg_len2, 0.0, 1.0)
            dist2 = (sx - t * (ex - bx)) ** 2 + (sy - t * (ey - by)) ** 2
            mask |= dist2 <= finger_r ** 2
    return mask


def gen_synthetic(spec: SyntheticGestureSpec, seed: int) -> tuple[ImageU8, YoloAnnotation, BitMask]:
    """Render one sample: (RGB image, YOLO annotation, ground-truth skin mask)."""
    rng = np.random.default_rng(seed)
    background = _render_background(spec, rng)
    mask = _hand_mask(spec, rng)
    tone = np.array(SKIN_TONES[int(rng.integers(0, len(SKIN_TONES)))], dtype=np.float64)

    img = background.copy()
    img[mask] = tone
    pixels = np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)

    ys, xs = np.nonzero(mask)
    from ..imaging.image import PixelBox
    box = PixelBox(int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))
    ann = voc_to_yolo(box, spec.finger_count, spec.canvas_w, spec.canvas_h)
    return ImageU8(np.ascontiguousarray(pixels)), ann, BitMask(mask)


def sample_seed(dataset_seed: int, class_index: int, sample_index: int) -> int:
    """Stable per-sample seed derivation via SeedSequence entropy mixing."""
    ss = np.random.SeedSequence([dataset_seed, class_index, sample_index])
    return int(ss.generate_state(1, np.uint64)[0])


def generate_dataset(root, num_classes: int, per_class: int, seed: int,
                     canvas: int = 96) -> list[Path]:
    """Write a root/<class>/<class>_<i>.png tree with YOLO sidecars and a label map.

    Class k means k raised fingers; backgrounds cycle through the styles.
    Returns the written image paths.
    """
    if not 1 <= num_classes <= len(GESTURE_NAMES):
        raise ContractViolation(
            f"num_classes must be in [1, {len(GESTURE_NAMES)}], got {num_classes}")
    if per_class < 1:
        raise ContractViolation(f"per_class must be >= 1, got {per_class}")
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    names = GESTURE_NAMES[:num_classes]
    (root / "labelmap.txt").write_text(write_label_map(build_label_map(names)),
                                       encoding="utf-8")
    written = []
    for k, name in enumerate(names):
        class_dir = root / name
        class_dir.mkdir(exist_ok=True)
        for i in range(per_class):
            spec = SyntheticGestureSpec(
                finger_count=k, canvas_w=canvas, canvas_h=canvas,
                background_style=i % 3)
            img, ann, _ = gen_synthetic(spec, sample_seed(seed, k, i))
            stem = f"{name}_{i:03d}"
            save_png(img, class_dir / f"{stem}.png")
            (class_dir / f"{stem}.txt").write_text(write_yolo([ann]), encoding="utf-8")
            written.append(class_dir / f"{stem}.png")
    return written
