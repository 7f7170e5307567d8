"""Shape-feature extraction and the nearest-match gesture store.

Each gesture is summarized by a 9-vector: the seven Hu moments of the
segmented hand component, the bounding-box aspect ratio, and the fill
ratio.  Stores standardize per dimension over everything enrolled and
match queries by Euclidean distance in the standardized space.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import ContractViolation, ParseError
from ..imaging.image import ImageU8
from ..imaging.morphology import morph_close, morph_open
from ..imaging.regions import hu_moments, largest_component
from ..imaging.segment import skin_mask_ycbcr
from ..dataset.labelmap import LabelMap, build_label_map

FEATURE_DIM = 9
STD_FLOOR = 1e-9


def extract_gesture_features(img: ImageU8) -> np.ndarray:
    """Segment, denoise, isolate the hand component, and describe its shape.

    Raises NoHandRegionError when segmentation finds nothing.
    """
    mask = morph_close(morph_open(skin_mask_ycbcr(img)))
    size, box, component = largest_component(mask)
    hu = hu_moments(component)
    aspect = box.width / box.height
    fill = size / box.area()
    return np.concatenate([hu, [aspect, fill]])


class FeatureStore:
    """Per-gesture feature vectors plus shared standardization statistics."""

    def __init__(self, label_map: LabelMap):
        self.label_map = label_map
        self.vectors: dict[str, list[np.ndarray]] = {name: [] for name in label_map.names}
        self.mean: np.ndarray | None = None
        self.std: np.ndarray | None = None

    def add(self, label: str, vector) -> None:
        vec = np.asarray(vector, dtype=np.float64)
        if vec.shape != (FEATURE_DIM,):
            raise ContractViolation(
                f"FeatureStore.add: vector shape {vec.shape} != ({FEATURE_DIM},)")
        if label not in self.vectors:
            raise ContractViolation(f"FeatureStore.add: unknown label {label!r}")
        self.vectors[label].append(vec)
        self.mean = None  # statistics stale until finalized

    def finalize(self) -> None:
        """Compute per-dimension mean/std over every enrolled vector."""
        all_vectors = [v for vs in self.vectors.values() for v in vs]
        if not all_vectors:
            raise ContractViolation("FeatureStore.finalize: store is empty")
        stacked = np.stack(all_vectors)
        self.mean = stacked.mean(axis=0)
        self.std = np.maximum(stacked.std(axis=0), STD_FLOOR)

    def is_ready(self) -> bool:
        return self.mean is not None


def nearest_match(store: FeatureStore, feature: np.ndarray) -> tuple[str, float]:
    """Closest enrolled vector by standardized Euclidean distance.

    Exact distance ties go to the smallest label id.
    """
    if not any(store.vectors.values()):
        raise ContractViolation("nearest_match: store is empty")
    if not store.is_ready():
        raise ContractViolation("nearest_match: store not finalized (no statistics)")
    query = (np.asarray(feature, dtype=np.float64) - store.mean) / store.std
    best_label: str | None = None
    best_distance = np.inf
    # label map order == ascending id, so strict-less keeps the smallest id on ties
    for name in store.label_map.names:
        for vec in store.vectors[name]:
            distance = float(np.linalg.norm((vec - store.mean) / store.std - query))
            if distance < best_distance:
                best_distance = distance
                best_label = name
    return best_label, best_distance


STATS_FILE = "standardization.txt"


def _format_vector(vec: np.ndarray) -> str:
    return " ".join(repr(float(v)) for v in vec)


def save_feature_store(store: FeatureStore, directory) -> None:
    """One text file per gesture label plus the shared standardization file."""
    if not store.is_ready():
        raise ContractViolation("save_feature_store: finalize the store first")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in store.label_map.names:
        lines = [_format_vector(v) + "\n" for v in store.vectors[name]]
        (directory / f"{name}.txt").write_text("".join(lines), encoding="utf-8")
    stats = (
        f"labels {' '.join(store.label_map.names)}\n"
        f"mean {_format_vector(store.mean)}\n"
        f"std {_format_vector(store.std)}\n"
    )
    (directory / STATS_FILE).write_text(stats, encoding="utf-8")


def load_feature_store(directory) -> FeatureStore:
    directory = Path(directory)
    stats_path = directory / STATS_FILE
    if not stats_path.is_file():
        raise ParseError(f"feature store at {directory} has no {STATS_FILE}")
    fields: dict[str, list[str]] = {}
    for line in stats_path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            key, *rest = line.split()
            fields[key] = rest
    for key in ("labels", "mean", "std"):
        if key not in fields:
            raise ParseError(f"{STATS_FILE} is missing the '{key}' line")
    store = FeatureStore(build_label_map(fields["labels"]))
    store.mean = np.array([float(v) for v in fields["mean"]])
    store.std = np.array([float(v) for v in fields["std"]])
    if store.mean.shape != (FEATURE_DIM,) or store.std.shape != (FEATURE_DIM,):
        raise ParseError(f"{STATS_FILE} statistics are not {FEATURE_DIM}-dimensional")
    for name in store.label_map.names:
        path = directory / f"{name}.txt"
        if not path.is_file():
            raise ParseError(f"feature store is missing vectors for label {name!r}")
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            values = [float(v) for v in line.split()]
            if len(values) != FEATURE_DIM:
                raise ParseError(
                    f"{path.name} line {lineno}: expected {FEATURE_DIM} values, "
                    f"got {len(values)}")
            store.vectors[name].append(np.array(values))
    return store
