"""VOC XML subset parsing and conversion to/from normalized YOLO boxes.

Pixel boxes are 0-based and inclusive on both corners; the +1 width term
in the conversion keeps round trips exact.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET

from ..errors import ContractViolation, ParseError
from ..imaging.image import PixelBox
from .yolo import YoloAnnotation


def _int_child(parent: ET.Element, tag: str, context: str) -> int:
    node = parent.find(tag)
    if node is None or node.text is None:
        raise ParseError(f"missing element <{tag}> in <{context}>")
    try:
        return int(node.text.strip())
    except ValueError:
        raise ParseError(f"element <{tag}> in <{context}> is not an integer: {node.text!r}") from None


def parse_voc_xml(doc: str) -> tuple[tuple[int, int], list[tuple[str, PixelBox]]]:
    """Extract ((width, height), [(class name, box), ...]); unknown elements are ignored."""
    try:
        root = ET.fromstring(doc)
    except ET.ParseError as exc:
        raise ParseError(f"not well-formed XML: {exc}") from None
    size = root.find("size")
    if size is None:
        raise ParseError("missing element <size>")
    width = _int_child(size, "width", "size")
    height = _int_child(size, "height", "size")
    if width < 1 or height < 1:
        raise ParseError(f"invalid image size {width}x{height}")

    objects = []
    for obj in root.iter("object"):
        name_node = obj.find("name")
        if name_node is None or not (name_node.text or "").strip():
            raise ParseError("missing element <name> in <object>")
        bndbox = obj.find("bndbox")
        if bndbox is None:
            raise ParseError("missing element <bndbox> in <object>")
        x_min = _int_child(bndbox, "xmin", "bndbox")
        y_min = _int_child(bndbox, "ymin", "bndbox")
        x_max = _int_child(bndbox, "xmax", "bndbox")
        y_max = _int_child(bndbox, "ymax", "bndbox")
        if x_max < x_min or y_max < y_min:
            raise ParseError(
                f"degenerate <bndbox> ({x_min}, {y_min}, {x_max}, {y_max})")
        if x_min < 0 or y_min < 0 or x_max >= width or y_max >= height:
            raise ParseError(
                f"<bndbox> ({x_min}, {y_min}, {x_max}, {y_max}) outside {width}x{height}")
        objects.append((name_node.text.strip(), PixelBox(x_min, y_min, x_max, y_max)))
    return (width, height), objects


def voc_to_yolo(box: PixelBox, class_id: int, img_w: int, img_h: int) -> YoloAnnotation:
    """Normalize an inclusive pixel box to a YOLO record."""
    if box.x_max >= img_w or box.y_max >= img_h:
        raise ContractViolation(f"voc_to_yolo: box {box} outside image {img_w}x{img_h}")
    return YoloAnnotation(
        class_id=class_id,
        cx=(box.x_min + box.x_max + 1) / (2.0 * img_w),
        cy=(box.y_min + box.y_max + 1) / (2.0 * img_h),
        w=(box.x_max - box.x_min + 1) / img_w,
        h=(box.y_max - box.y_min + 1) / img_h,
    )


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def yolo_to_pixel_box(ann: YoloAnnotation, img_w: int, img_h: int) -> PixelBox:
    """Inverse of voc_to_yolo; recovers the original inclusive pixel box exactly."""
    x_min = _round_half_up(ann.cx * img_w - ann.w * img_w / 2.0)
    x_max = _round_half_up(ann.cx * img_w + ann.w * img_w / 2.0) - 1
    y_min = _round_half_up(ann.cy * img_h - ann.h * img_h / 2.0)
    y_max = _round_half_up(ann.cy * img_h + ann.h * img_h / 2.0) - 1
    x_min = max(0, x_min)
    y_min = max(0, y_min)
    x_max = min(img_w - 1, max(x_max, x_min))
    y_max = min(img_h - 1, max(y_max, y_min))
    return PixelBox(x_min, y_min, x_max, y_max)
