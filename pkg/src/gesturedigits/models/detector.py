"""SxS-grid single-shot detection: target encoding, loss, IoU and NMS.

The cell containing a box's center is responsible for that box.  Cells
store per box (cx offset, cy offset, sqrt width, sqrt height, confidence)
followed by class scores.  Targets only ever occupy box slot 0; with more
than one predictor per cell the extra slots train as no-object.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ContractViolation
from ..nn.ops import l2_penalty
from .network import Network
from ..dataset.yolo import YoloAnnotation


@dataclass(frozen=True)
class DetectorConfig:
    grid_size: int = 3
    boxes_per_cell: int = 1
    num_classes: int = 6
    lambda_coord: float = 5.0
    lambda_noobj: float = 0.5
    weight_decay: float = 0.0

    def __post_init__(self):
        if self.grid_size < 1 or self.boxes_per_cell < 1 or self.num_classes < 1:
            raise ContractViolation(f"DetectorConfig: S, B, C must all be >= 1, got {self}")
        if min(self.lambda_coord, self.lambda_noobj, self.weight_decay) < 0:
            raise ContractViolation(f"DetectorConfig: negative loss weight in {self}")

    @property
    def cell_depth(self) -> int:
        return self.boxes_per_cell * 5 + self.num_classes

    def grid_shape(self) -> tuple[int, int, int]:
        return (self.grid_size, self.grid_size, self.cell_depth)


def encode_targets(annotations: list[YoloAnnotation], cfg: DetectorConfig) -> np.ndarray:
    """Build the target grid; a later annotation wins a contested cell."""
    s = cfg.grid_size
    grid = np.zeros(cfg.grid_shape())
    for ann in annotations:
        if ann.class_id >= cfg.num_classes:
            raise ContractViolation(
                f"encode_targets: class {ann.class_id} >= C={cfg.num_classes}")
        col = min(int(ann.cx * s), s - 1)
        row = min(int(ann.cy * s), s - 1)
        grid[row, col, :] = 0.0
        grid[row, col, 0] = ann.cx * s - col
        grid[row, col, 1] = ann.cy * s - row
        grid[row, col, 2] = np.sqrt(ann.w)
        grid[row, col, 3] = np.sqrt(ann.h)
        grid[row, col, 4] = 1.0
        grid[row, col, cfg.boxes_per_cell * 5 + ann.class_id] = 1.0
    return grid


def decode_grid(grid: np.ndarray, cfg: DetectorConfig,
                confidence_threshold: float = 0.5) -> list[tuple[tuple[float, float, float, float], int, float]]:
    """Read boxes back out of a grid as ((cx, cy, w, h), class index, confidence).

    Inverts encode_targets exactly for target grids; for raw predictions the
    squared sizes make w and h nonnegative by construction.
    """
    if grid.shape != cfg.grid_shape():
        raise ContractViolation(
            f"decode_grid: grid shape {grid.shape} != {cfg.grid_shape()}")
    s = cfg.grid_size
    detections = []
    class_scores = grid[..., cfg.boxes_per_cell * 5:]
    for row in range(s):
        for col in range(s):
            for slot in range(cfg.boxes_per_cell):
                base = slot * 5
                conf = float(grid[row, col, base + 4])
                if conf < confidence_threshold:
                    continue
                cx = (col + float(grid[row, col, base + 0])) / s
                cy = (row + float(grid[row, col, base + 1])) / s
                w = float(grid[row, col, base + 2]) ** 2
                h = float(grid[row, col, base + 3]) ** 2
                class_idx = int(np.argmax(class_scores[row, col]))
                detections.append(((cx, cy, w, h), class_idx, conf))
    return detections


def iou(a, b) -> float:
    """Intersection over union of two (cx, cy, w, h) boxes; 0 when disjoint."""
    ax0, ay0 = a[0] - a[2] / 2, a[1] - a[3] / 2
    ax1, ay1 = a[0] + a[2] / 2, a[1] + a[3] / 2
    bx0, by0 = b[0] - b[2] / 2, b[1] - b[3] / 2
    bx1, by1 = b[0] + b[2] / 2, b[1] + b[3] / 2
    iw = min(ax1, bx1) - max(ax0, bx0)
    ih = min(ay1, by1) - max(ay0, by0)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    # areas from the same corner arithmetic so identical boxes give exactly 1
    union = (ax1 - ax0) * (ay1 - ay0) + (bx1 - bx0) * (by1 - by0) - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def nms(detections, iou_threshold: float):
    """Greedy per-class suppression; keeps descending-score order, input order on ties."""
    for _, _, score in detections:
        if not 0.0 <= score <= 1.0:
            raise ContractViolation(f"nms: score {score} outside [0, 1]")
    indexed = sorted(enumerate(detections), key=lambda p: (-p[1][2], p[0]))
    kept: list[tuple[tuple, int, float]] = []
    for _, (box, class_idx, score) in indexed:
        suppressed = any(
            k_class == class_idx and iou(box, k_box) > iou_threshold
            for k_box, k_class, _ in kept)
        if not suppressed:
            kept.append((box, class_idx, score))
    return kept


@dataclass(frozen=True)
class DetectorLoss:
    total: float
    localization: float
    confidence: float
    classification: float
    regularization: float


def _check_grids(pred: np.ndarray, target: np.ndarray, cfg: DetectorConfig) -> None:
    if pred.shape != cfg.grid_shape() or target.shape != cfg.grid_shape():
        raise ContractViolation(
            f"detector_loss: shapes {pred.shape} / {target.shape} != {cfg.grid_shape()}")


def detector_loss(pred: np.ndarray, target: np.ndarray, cfg: DetectorConfig,
                  network: Network | None = None) -> DetectorLoss:
    """Squared-error grid loss split into its localization/confidence/class/decay parts."""
    _check_grids(pred, target, cfg)
    b = cfg.boxes_per_cell
    responsible = target[..., 4] == 1.0

    coord_diff = (pred[..., 0:4] - target[..., 0:4])[responsible]
    localization = cfg.lambda_coord * float(np.sum(coord_diff ** 2))

    confidence = 0.0
    for slot in range(b):
        conf_diff = pred[..., slot * 5 + 4] - target[..., slot * 5 + 4]
        obj = responsible if slot == 0 else np.zeros_like(responsible)
        confidence += float(np.sum(conf_diff[obj] ** 2))
        confidence += cfg.lambda_noobj * float(np.sum(conf_diff[~obj] ** 2))

    class_diff = (pred[..., b * 5:] - target[..., b * 5:])[responsible]
    classification = float(np.sum(class_diff ** 2))

    regularization = 0.0
    if network is not None and cfg.weight_decay > 0.0:
        regularization = l2_penalty(network.params(), cfg.weight_decay)

    total = localization + confidence + classification + regularization
    return DetectorLoss(total, localization, confidence, classification, regularization)


def detector_loss_grad(pred: np.ndarray, target: np.ndarray,
                       cfg: DetectorConfig) -> np.ndarray:
    """Gradient of the grid terms of detector_loss w.r.t. the predictions."""
    _check_grids(pred, target, cfg)
    b = cfg.boxes_per_cell
    responsible = target[..., 4] == 1.0
    grad = np.zeros_like(pred)

    diff = pred - target
    grad[..., 0:4] = 2.0 * cfg.lambda_coord * diff[..., 0:4] * responsible[..., None]
    for slot in range(b):
        idx = slot * 5 + 4
        obj = responsible if slot == 0 else np.zeros_like(responsible)
        grad[..., idx] = 2.0 * diff[..., idx] * np.where(obj, 1.0, cfg.lambda_noobj)
    grad[..., b * 5:] = 2.0 * diff[..., b * 5:] * responsible[..., None]
    return grad
