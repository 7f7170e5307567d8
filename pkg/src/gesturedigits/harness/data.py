"""Example loading and preprocessing shared by training, evaluation and inference.

Classifier inputs are 32x32 grayscale crops of the segmented hand box;
detector inputs are 96x96 RGB full frames.  Both are float64 in [0, 1].
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..dataset.labelmap import LabelMap
from ..dataset.manifest import ManifestItem
from ..dataset.yolo import parse_yolo_text
from ..errors import DataError, NoHandRegionError, ParseError
from ..imaging.color import rgb_to_ycbcr
from ..imaging.image import ImageU8, PixelBox, crop, load_png, resize
from ..imaging.morphology import morph_close, morph_open
from ..imaging.regions import largest_component_bbox
from ..imaging.segment import skin_mask_ycbcr
from .config import CLASSIFIER_INPUT_SIDE, DETECTOR_INPUT_SIDE


def segment_hand_box(img: ImageU8) -> PixelBox:
    """Skin mask, denoise, box the largest component.  Raises NoHandRegionError."""
    mask = morph_close(morph_open(skin_mask_ycbcr(img)))
    return largest_component_bbox(mask)


def to_gray_unit(img: ImageU8) -> np.ndarray:
    """Luma plane scaled to [0, 1], shaped (1, h, w)."""
    if img.channels == 3:
        y = rgb_to_ycbcr(img).pixels[..., 0]
    else:
        y = img.pixels[..., 0]
    return (y.astype(np.float64) / 255.0)[None, :, :]


def to_rgb_unit(img: ImageU8) -> np.ndarray:
    """RGB scaled to [0, 1], shaped (3, h, w)."""
    if img.channels == 1:
        rgb = np.repeat(img.pixels, 3, axis=2)
    else:
        rgb = img.pixels
    return np.ascontiguousarray(rgb.astype(np.float64).transpose(2, 0, 1) / 255.0)


def classifier_input(img: ImageU8, input_side: int = CLASSIFIER_INPUT_SIDE) -> np.ndarray:
    """Crop to the segmented hand box, resize, grayscale-normalize.

    Falls back to the full frame when segmentation finds no hand, so a
    training run never crashes on a degenerate sample.
    """
    try:
        box = segment_hand_box(img)
        img = crop(img, box)
    except NoHandRegionError:
        pass
    return to_gray_unit(resize(img, input_side, input_side, "bilinear"))


def detector_input(img: ImageU8, input_side: int = DETECTOR_INPUT_SIDE) -> np.ndarray:
    return to_rgb_unit(resize(img, input_side, input_side, "bilinear"))


def _read_image(path: str) -> ImageU8:
    try:
        return load_png(path)
    except (FileNotFoundError, OSError) as exc:
        raise DataError(f"cannot read image {path}: {exc}") from None


def load_classifier_examples(items: list[ManifestItem],
                             label_map: LabelMap) -> list[tuple[np.ndarray, int]]:
    """(input tensor, class index) pairs in manifest order."""
    examples = []
    for item in items:
        img = _read_image(item.image_path)
        try:
            class_index = label_map.index_of(item.label)
        except KeyError:
            raise DataError(
                f"label {item.label!r} of {item.image_path} not in label map") from None
        examples.append((classifier_input(img), class_index))
    return examples


def load_detector_examples(items: list[ManifestItem], detector_cfg) -> list[tuple[np.ndarray, np.ndarray]]:
    """(input tensor, target grid) pairs; annotations come from YOLO sidecars."""
    from ..models.detector import encode_targets

    examples = []
    for item in items:
        img = _read_image(item.image_path)
        sidecar = Path(item.image_path).with_suffix(".txt")
        if not sidecar.is_file():
            raise DataError(f"missing YOLO sidecar for {item.image_path}")
        try:
            annotations = parse_yolo_text(sidecar.read_text(encoding="utf-8"))
        except ParseError as exc:
            raise DataError(f"bad sidecar {sidecar}: {exc}") from None
        examples.append((detector_input(img), encode_targets(annotations, detector_cfg)))
    return examples
