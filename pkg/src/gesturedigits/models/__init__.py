"""Gesture classifier, grid detector, feature store and checkpoints."""

from .network import (
    Network,
    build_classifier,
    build_detector,
    network_from_descriptor,
    set_trainable,
    transfer_parameters,
)
from .detector import (
    DetectorConfig,
    decode_grid,
    detector_loss,
    detector_loss_grad,
    encode_targets,
    iou,
    nms,
)
from .features import (
    FeatureStore,
    extract_gesture_features,
    load_feature_store,
    nearest_match,
    save_feature_store,
)
from .checkpoint import load_checkpoint, load_checkpoint_into, save_checkpoint

__all__ = [
    "Network",
    "build_classifier",
    "build_detector",
    "network_from_descriptor",
    "set_trainable",
    "transfer_parameters",
    "DetectorConfig",
    "decode_grid",
    "detector_loss",
    "detector_loss_grad",
    "encode_targets",
    "iou",
    "nms",
    "FeatureStore",
    "extract_gesture_features",
    "load_feature_store",
    "nearest_match",
    "save_feature_store",
    "load_checkpoint",
    "load_checkpoint_into",
    "save_checkpoint",
]
