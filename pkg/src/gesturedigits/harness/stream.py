"""Frame-sequence inference: the real-time pipeline over a directory of frames."""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

from ..imaging.image import PixelBox, load_png
from .infer import infer_image


@dataclass(frozen=True)
class StreamRecord:
    frame_index: int
    label: str | None
    confidence: float
    box: PixelBox | None
    elapsed_ms: float
    error: str | None = None


def frames_in_directory(directory) -> list[Path]:
    """PNG frames in lexicographic order, the stand-in for a camera stream."""
    return sorted(Path(directory).glob("*.png"))


def run_stream(model, frame_source, sink=None, pipeline: str = "detector",
               label_map=None, detector_cfg=None) -> list[StreamRecord]:
    """Apply infer to each frame in order; emit one timed record per frame.

    A frame that fails to decode produces an error record and the stream
    continues.  Frames are never reordered.
    """
    if isinstance(frame_source, (str, Path)):
        frame_source = frames_in_directory(frame_source)
    records: list[StreamRecord] = []
    for index, frame_path in enumerate(frame_source):
        start = time.perf_counter()
        try:
            img = load_png(frame_path)
            result = infer_image(model, img, pipeline, label_map=label_map,
                                 detector_cfg=detector_cfg)
            elapsed = (time.perf_counter() - start) * 1000.0
            record = StreamRecord(index, result.label, result.confidence,
                                  result.box, elapsed)
        except (OSError, ValueError) as exc:
            elapsed = (time.perf_counter() - start) * 1000.0
            record = StreamRecord(index, None, 0.0, None, elapsed,
                                  error=f"{frame_path}: {exc}")
        records.append(record)
        if sink is not None:
            sink(record)
    return records
