"""Single-image inference through the three pipelines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset.labelmap import LabelMap
from ..errors import ContractViolation, NoHandRegionError
from ..imaging.image import ImageU8, PixelBox, crop, load_png, resize
from ..models.detector import DetectorConfig, decode_grid, nms
from ..models.features import FeatureStore, extract_gesture_features, nearest_match
from ..models.network import Network
from .config import CLASSIFIER_INPUT_SIDE
from .data import segment_hand_box, to_gray_unit

PIPELINES = ("cnn", "features", "detector")

DETECTOR_CONFIDENCE_THRESHOLD = 0.25
DETECTOR_NMS_THRESHOLD = 0.5


@dataclass(frozen=True)
class InferResult:
    """label None means an explicit no-detection outcome, never a crash."""

    label: str | None
    confidence: float
    box: PixelBox | None

    @property
    def detected(self) -> bool:
        return self.label is not None


NO_DETECTION = InferResult(label=None, confidence=0.0, box=None)


def _clamp_box(cx: float, cy: float, w: float, h: float,
               img_w: int, img_h: int) -> PixelBox | None:
    x0 = int(np.floor((cx - w / 2) * img_w))
    x1 = int(np.ceil((cx + w / 2) * img_w)) - 1
    y0 = int(np.floor((cy - h / 2) * img_h))
    y1 = int(np.ceil((cy + h / 2) * img_h)) - 1
    x0, y0 = max(0, x0), max(0, y0)
    x1, y1 = min(img_w - 1, x1), min(img_h - 1, y1)
    if x1 < x0 or y1 < y0:
        return None
    return PixelBox(x0, y0, x1, y1)


def infer_image(model, img: ImageU8, pipeline: str,
                label_map: LabelMap | None = None,
                detector_cfg: DetectorConfig | None = None) -> InferResult:
    """Run one pipeline over an in-memory image."""
    if pipeline not in PIPELINES:
        raise ContractViolation(f"infer: unknown pipeline {pipeline!r}")

    if pipeline == "cnn":
        net: Network = model
        if label_map is None:
            raise ContractViolation("infer: cnn pipeline needs a label map")
        try:
            box = segment_hand_box(img)
        except NoHandRegionError:
            return NO_DETECTION
        patch = resize(crop(img, box), CLASSIFIER_INPUT_SIDE, CLASSIFIER_INPUT_SIDE,
                       "bilinear")
        probs = net.forward(to_gray_unit(patch))
        idx = int(np.argmax(probs))
        return InferResult(label=label_map.name_of_index(idx),
                           confidence=float(probs[idx]), box=box)

    if pipeline == "features":
        store: FeatureStore = model
        try:
            box = segment_hand_box(img)
            feats = extract_gesture_features(img)
        except NoHandRegionError:
            return NO_DETECTION
        label, distance = nearest_match(store, feats)
        return InferResult(label=label, confidence=1.0 / (1.0 + distance), box=box)

    # detector: full-frame grid forward, decode, suppress, best box
    net = model
    if label_map is None:
        raise ContractViolation("infer: detector pipeline needs a label map")
    if detector_cfg is None:
        raise ContractViolation("infer: detector pipeline needs a DetectorConfig")
    side = net.input_shape[1]
    frame = resize(img, side, side, "bilinear")
    from .data import to_rgb_unit

    flat = net.forward_logits(to_rgb_unit(frame))
    grid = flat.reshape(detector_cfg.grid_shape())
    raw = decode_grid(grid, detector_cfg, DETECTOR_CONFIDENCE_THRESHOLD)
    detections = [(box, cls, float(np.clip(conf, 0.0, 1.0))) for box, cls, conf in raw]
    kept = nms(detections, DETECTOR_NMS_THRESHOLD)
    if not kept:
        return NO_DETECTION
    (cx, cy, w, h), class_idx, score = max(kept, key=lambda d: d[2])
    pixel_box = _clamp_box(cx, cy, w, h, img.width, img.height)
    if pixel_box is None:
        return NO_DETECTION
    return InferResult(label=label_map.name_of_index(class_idx),
                       confidence=score, box=pixel_box)


def infer(model, image_path, pipeline: str,
          label_map: LabelMap | None = None,
          detector_cfg: DetectorConfig | None = None) -> InferResult:
    """Load an image from disk and run the requested pipeline."""
    return infer_image(model, load_png(image_path), pipeline,
                       label_map=label_map, detector_cfg=detector_cfg)
