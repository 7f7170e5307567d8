"""Ordered class-name to id assignment; ids run 1..N in listed order."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ContractViolation, ParseError


@dataclass(frozen=True)
class LabelMap:
    entries: tuple[tuple[str, int], ...]

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def id_of(self, name: str) -> int:
        for n, i in self.entries:
            if n == name:
                return i
        raise KeyError(name)

    def name_of(self, label_id: int) -> str:
        for n, i in self.entries:
            if i == label_id:
                return n
        raise KeyError(label_id)

    def index_of(self, name: str) -> int:
        """0-based class index, the id used inside YOLO sidecar files."""
        return self.id_of(name) - 1

    def name_of_index(self, index: int) -> str:
        return self.name_of(index + 1)


def build_label_map(names) -> LabelMap:
    """Assign ids 1..N to unique non-empty names in input order."""
    names = list(names)
    if not names:
        raise ContractViolation("build_label_map: no names given")
    seen = set()
    entries = []
    for offset, name in enumerate(names, start=1):
        if not name:
            raise ContractViolation("build_label_map: empty class name")
        if name in seen:
            raise ContractViolation(f"build_label_map: duplicate class name {name!r}")
        seen.add(name)
        entries.append((name, offset))
    return LabelMap(tuple(entries))


def write_label_map(label_map: LabelMap) -> str:
    """One name per line; the line number is the id."""
    return "".join(f"{name}\n" for name in label_map.names)


def parse_label_map(text: str) -> LabelMap:
    names = [line.strip() for line in text.splitlines() if line.strip()]
    if not names:
        raise ParseError("label map file has no names")
    try:
        return build_label_map(names)
    except ContractViolation as exc:
        raise ParseError(str(exc)) from None
