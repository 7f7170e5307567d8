"""Annotation formats, label maps, splits, ingestion and synthetic data."""

from .yolo import YoloAnnotation, parse_yolo_line, parse_yolo_text, write_yolo
from .voc import parse_voc_xml, voc_to_yolo, yolo_to_pixel_box
from .labelmap import LabelMap, build_label_map
from .split import split_dataset
from .manifest import (
    DatasetManifest,
    ManifestItem,
    assign_splits,
    ingest_directory,
    load_manifest,
    save_manifest,
    unique_image_id,
)
from .synthetic import SyntheticGestureSpec, gen_synthetic, generate_dataset, GESTURE_NAMES

__all__ = [
    "YoloAnnotation",
    "parse_yolo_line",
    "parse_yolo_text",
    "write_yolo",
    "parse_voc_xml",
    "voc_to_yolo",
    "yolo_to_pixel_box",
    "LabelMap",
    "build_label_map",
    "split_dataset",
    "DatasetManifest",
    "ManifestItem",
    "assign_splits",
    "ingest_directory",
    "load_manifest",
    "save_manifest",
    "unique_image_id",
    "SyntheticGestureSpec",
    "gen_synthetic",
    "generate_dataset",
    "GESTURE_NAMES",
]
