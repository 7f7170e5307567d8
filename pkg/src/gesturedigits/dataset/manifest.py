"""Dataset manifests: directory ingestion, unique ids, TSV persistence."""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..errors import IngestionError, ParseError
from .split import split_dataset

IMAGE_EXTENSIONS = {".png"}
_SPLITS = ("train", "val")


def unique_image_id(rng: random.Random | None = None) -> str:
    """128 random bits, hex-encoded to 32 characters."""
    bits = (rng or random).getrandbits(128)
    return f"{bits:032x}"


@dataclass(frozen=True)
class ManifestItem:
    image_id: str
    image_path: str
    label: str
    split: str = "train"

    def __post_init__(self):
        if self.split not in _SPLITS:
            raise ParseError(f"unknown split {self.split!r} for item {self.image_id}")


@dataclass(frozen=True)
class DatasetManifest:
    items: tuple[ManifestItem, ...]
    seed: int = 0
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def train_items(self) -> list[ManifestItem]:
        return [it for it in self.items if it.split == "train"]

    def val_items(self) -> list[ManifestItem]:
        return [it for it in self.items if it.split == "val"]

    def class_names(self) -> list[str]:
        seen: dict[str, None] = {}
        for it in self.items:
            seen.setdefault(it.label, None)
        return sorted(seen)


def ingest_directory(root, rng: random.Random | None = None) -> DatasetManifest:
    """Build a manifest from a root/<class_name>/<image>.png tree.

    Class name is the subdirectory name; ordering is lexicographic over
    directories then files, so identical trees ingest identically.
    Non-image files are skipped with a warning record.
    """
    root = Path(root)
    if not root.is_dir():
        raise IngestionError(f"dataset root {root} is not a directory")
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise IngestionError(f"dataset root {root} contains no class directories")
    items: list[ManifestItem] = []
    warnings: list[str] = []
    for class_dir in class_dirs:
        files = sorted(p for p in class_dir.iterdir() if p.is_file())
        images = []
        for f in files:
            if f.suffix.lower() in IMAGE_EXTENSIONS:
                images.append(f)
            elif f.suffix.lower() == ".txt":
                continue  # annotation sidecar, not an image
            else:
                warnings.append(f"skipped {f}: extension {f.suffix!r} not in allow-list")
        if not images:
            raise IngestionError(f"class directory {class_dir} contains no images")
        for image in images:
            items.append(ManifestItem(
                image_id=unique_image_id(rng),
                image_path=str(image),
                label=class_dir.name,
            ))
    return DatasetManifest(items=tuple(items), warnings=tuple(warnings))


def assign_splits(manifest: DatasetManifest, train_fraction: float,
                  seed: int) -> DatasetManifest:
    """Partition manifest items with the standard seeded shuffle."""
    train_ids, _ = split_dataset([it.image_id for it in manifest.items],
                                 train_fraction, seed)
    train_set = set(train_ids)
    items = tuple(
        replace(it, split="train" if it.image_id in train_set else "val")
        for it in manifest.items)
    return DatasetManifest(items=items, seed=seed, warnings=manifest.warnings)


def save_manifest(manifest: DatasetManifest, path) -> None:
    """Persist as id<TAB>path<TAB>class<TAB>split lines, seed in a comment header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# seed={manifest.seed}\n"]
    lines += [f"{it.image_id}\t{it.image_path}\t{it.label}\t{it.split}\n"
              for it in manifest.items]
    path.write_text("".join(lines), encoding="utf-8")


def load_manifest(path) -> DatasetManifest:
    seed = 0
    items = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("#"):
            if "seed=" in line:
                seed = int(line.split("seed=", 1)[1])
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise ParseError(f"line {lineno}: expected 4 tab-separated fields, got {len(fields)}")
        items.append(ManifestItem(*fields))
    return DatasetManifest(items=tuple(items), seed=seed)
