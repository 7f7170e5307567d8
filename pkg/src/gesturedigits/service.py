"""HTTP annotation service.

Serves dataset images and their YOLO sidecars so a browser UI can label
gestures.  The wire format is JSON with normalized coordinates; what
lands on disk is exactly the YOLO text the training pipeline reads.
Writes go through a temp file and an atomic rename, so no request
sequence can leave a half-written sidecar.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import HTMLResponse, JSONResponse, Response
from pydantic import BaseModel

from .dataset.labelmap import LabelMap
from .dataset.yolo import YoloAnnotation, parse_yolo_text, write_yolo
from .errors import ContractViolation, ParseError
from .imaging.image import load_png

PLACEHOLDER_PAGE = """<!doctype html>
<html><head><title>gesturedigits annotator</title></head>
<body><h1>gesturedigits annotation service</h1>
<p>UI bundle not built. The JSON API is live under /api/.</p></body></html>
"""


class BoxIn(BaseModel):
    class_id: int
    cx: float
    cy: float
    w: float
    h: float


class AnnotationIn(BaseModel):
    boxes: list[BoxIn]


def _image_files(root: Path) -> list[Path]:
    return sorted(root.glob("*.png"))


def _png_size(path: Path) -> tuple[int, int]:
    from PIL import Image

    with Image.open(path) as im:
        return im.size  # (width, height)


def create_app(dataset_root, label_map: LabelMap, static_dir=None) -> FastAPI:
    root = Path(dataset_root)
    if not root.is_dir():
        raise ContractViolation(f"annotation service: {root} is not a directory")
    static = Path(static_dir) if static_dir else None
    app = FastAPI(title="gesturedigits annotator")

    def image_path(image_id: str) -> Path | None:
        # ids are file stems; reject anything that could escape the root
        if "/" in image_id or "\\" in image_id or image_id.startswith("."):
            return None
        candidate = root / f"{image_id}.png"
        return candidate if candidate.is_file() else None

    def sidecar_path(image_id: str) -> Path:
        return root / f"{image_id}.txt"

    @app.get("/api/images")
    def list_images():
        entries = []
        for path in _image_files(root):
            width, height = _png_size(path)
            entry = {"image_id": path.stem, "width": width, "height": height,
                     "annotated": False}
            sidecar = sidecar_path(path.stem)
            if sidecar.is_file():
                try:
                    parse_yolo_text(sidecar.read_text(encoding="utf-8"))
                    entry["annotated"] = True
                except ParseError as exc:
                    entry["warning"] = f"sidecar unreadable: {exc}"
            entries.append(entry)
        return entries

    @app.get("/api/images/{image_id}")
    def get_image(image_id: str):
        path = image_path(image_id)
        if path is None:
            return JSONResponse({"detail": f"unknown image {image_id!r}"}, status_code=404)
        return Response(path.read_bytes(), media_type="image/png")

    @app.get("/api/annotations/{image_id}")
    def get_annotation(image_id: str):
        path = image_path(image_id)
        if path is None:
            return JSONResponse({"detail": f"unknown image {image_id!r}"}, status_code=404)
        width, height = _png_size(path)
        boxes = []
        sidecar = sidecar_path(image_id)
        if sidecar.is_file():
            for ann in parse_yolo_text(sidecar.read_text(encoding="utf-8")):
                boxes.append({"class_id": ann.class_id, "cx": ann.cx, "cy": ann.cy,
                              "w": ann.w, "h": ann.h})
        return {"image_id": image_id, "image_w": width, "image_h": height,
                "boxes": boxes}

    @app.put("/api/annotations/{image_id}")
    def put_annotation(image_id: str, record: AnnotationIn):
        path = image_path(image_id)
        if path is None:
            return JSONResponse({"detail": f"unknown image {image_id!r}"}, status_code=404)
        annotations = []
        for i, box in enumerate(record.boxes):
            if not 0 <= box.class_id < len(label_map):
                return JSONResponse(
                    {"detail": f"boxes[{i}].class_id {box.class_id} not in the "
                               f"label map (0..{len(label_map) - 1})"},
                    status_code=400)
            try:
                annotations.append(YoloAnnotation(box.class_id, box.cx, box.cy,
                                                  box.w, box.h))
            except ContractViolation as exc:
                return JSONResponse({"detail": f"boxes[{i}]: {exc}"}, status_code=400)
        # validation passed; write atomically so readers never see half a file
        payload = write_yolo(annotations)
        fd, tmp_name = tempfile.mkstemp(dir=root, prefix=".annot-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(payload)
            os.replace(tmp_name, sidecar_path(image_id))
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
        return Response(status_code=204)

    @app.get("/api/labelmap")
    def get_labelmap():
        return [{"name": name, "id": label_id} for name, label_id in label_map.entries]

    @app.get("/")
    def index():
        if static is not None and (static / "index.html").is_file():
            return HTMLResponse((static / "index.html").read_text(encoding="utf-8"))
        return HTMLResponse(PLACEHOLDER_PAGE)

    @app.get("/static/{asset_path:path}")
    def static_asset(asset_path: str):
        if static is None:
            return JSONResponse({"detail": "no static bundle configured"}, status_code=404)
        target = (static / asset_path).resolve()
        if not str(target).startswith(str(static.resolve())) or not target.is_file():
            return JSONResponse({"detail": f"no asset {asset_path!r}"}, status_code=404)
        media = {
            ".js": "text/javascript",
            ".css": "text/css",
            ".html": "text/html",
            ".map": "application/json",
        }.get(target.suffix, "application/octet-stream")
        return Response(target.read_bytes(), media_type=media)

    # sanity check: the service is useless if it cannot read its own images
    try:
        for path in _image_files(root)[:1]:
            load_png(path)
    except OSError as exc:
        raise ContractViolation(f"annotation service: unreadable dataset: {exc}") from None
    return app
