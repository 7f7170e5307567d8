"""YOLO text annotations: one line per object, class id then normalized box.

Class ids on disk are 0-based indexes into the ordered label map, the
darknet names-file convention.  Coordinates are center-x, center-y,
width, height, all normalized to [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ContractViolation, ParseError

# slack for boxes whose half-extent leaves [0,1] only through 6-decimal rounding
EDGE_TOL = 1e-6


@dataclass(frozen=True)
class YoloAnnotation:
    class_id: int
    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        if self.class_id < 0:
            raise ContractViolation(f"YoloAnnotation: negative class id {self.class_id}")
        if not (0.0 <= self.cx <= 1.0 and 0.0 <= self.cy <= 1.0):
            raise ContractViolation(f"YoloAnnotation: center ({self.cx}, {self.cy}) outside [0, 1]")
        if not (0.0 < self.w <= 1.0 and 0.0 < self.h <= 1.0):
            raise ContractViolation(f"YoloAnnotation: size ({self.w}, {self.h}) outside (0, 1]")
        for lo, hi in ((self.cx - self.w / 2, self.cx + self.w / 2),
                       (self.cy - self.h / 2, self.cy + self.h / 2)):
            if lo < -EDGE_TOL or hi > 1.0 + EDGE_TOL:
                raise ContractViolation(
                    f"YoloAnnotation: box [{lo:.8f}, {hi:.8f}] leaves the unit square")


def parse_yolo_line(line: str, lineno: int | None = None) -> YoloAnnotation:
    """Parse one 'class cx cy w h' record; errors carry the line number."""
    where = f"line {lineno}: " if lineno is not None else ""
    fields = line.split()
    if len(fields) != 5:
        raise ParseError(f"{where}expected 5 fields, got {len(fields)}: {line!r}")
    try:
        class_id = int(fields[0])
    except ValueError:
        raise ParseError(f"{where}class id {fields[0]!r} is not an integer") from None
    try:
        cx, cy, w, h = (float(f) for f in fields[1:])
    except ValueError:
        raise ParseError(f"{where}non-numeric coordinate in {line!r}") from None
    try:
        return YoloAnnotation(class_id, cx, cy, w, h)
    except ContractViolation as exc:
        raise ParseError(f"{where}{exc}") from None


def parse_yolo_text(text: str) -> list[YoloAnnotation]:
    """Parse a whole sidecar file; blank lines are permitted and skipped."""
    annotations = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            annotations.append(parse_yolo_line(line, lineno))
    return annotations


def write_yolo(annotations: list[YoloAnnotation]) -> str:
    """Serialize records, reals at 6 decimal places, one newline-terminated line each."""
    return "".join(
        f"{a.class_id} {a.cx:.6f} {a.cy:.6f} {a.w:.6f} {a.h:.6f}\n" for a in annotations)
