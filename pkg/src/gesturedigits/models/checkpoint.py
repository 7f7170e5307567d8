"""Binary checkpoint format.

Layout, all integers little-endian:

    magic             8 bytes  b"GSTCKPT1"
    format version    u16      (currently 1)
    descriptor        u32 length + UTF-8 canonical architecture JSON
    training step     u64
    parameter count   u32
    per parameter:
        name          u32 length + UTF-8
        rank          u32
        dims          u32 each
        data          raw float64, row-major

Round trips are bit-exact; loading into a network with a different
architecture descriptor raises ArchitectureMismatchError.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import (
    ArchitectureMismatchError,
    CheckpointVersionError,
    NotACheckpointError,
    TruncatedCheckpointError,
)
from .network import Network, network_from_descriptor

MAGIC = b"GSTCKPT1"
FORMAT_VERSION = 1


def save_checkpoint(net: Network, step: int, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    descriptor = net.descriptor_json().encode("utf-8")
    chunks = [MAGIC, struct.pack("<H", FORMAT_VERSION),
              struct.pack("<I", len(descriptor)), descriptor,
              struct.pack("<Q", step)]
    params = net.params()
    chunks.append(struct.pack("<I", len(params)))
    for name, value in params.items():
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<I", value.ndim))
        chunks.append(struct.pack(f"<{value.ndim}I", *value.shape))
        chunks.append(np.ascontiguousarray(value, dtype="<f8").tobytes())
    path.write_bytes(b"".join(chunks))


class _Reader:
    def __init__(self, data: bytes, path):
        self.data = data
        self.path = path
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedCheckpointError(
                f"{self.path}: needed {n} bytes at offset {self.pos}, "
                f"file has {len(self.data)}")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]


def _read_payload(path) -> tuple[str, int, dict[str, np.ndarray]]:
    raw = Path(path).read_bytes()
    reader = _Reader(raw, path)
    if reader.take(len(MAGIC)) != MAGIC:
        raise NotACheckpointError(f"{path}: bad magic, not a checkpoint file")
    version = reader.u16()
    if version != FORMAT_VERSION:
        raise CheckpointVersionError(
            f"{path}: format version {version}, expected {FORMAT_VERSION}")
    descriptor = reader.take(reader.u32()).decode("utf-8")
    step = reader.u64()
    params: dict[str, np.ndarray] = {}
    for _ in range(reader.u32()):
        name = reader.take(reader.u32()).decode("utf-8")
        rank = reader.u32()
        dims = struct.unpack(f"<{rank}I", reader.take(4 * rank))
        count = int(np.prod(dims)) if rank else 1
        data = np.frombuffer(reader.take(8 * count), dtype="<f8").reshape(dims)
        params[name] = np.ascontiguousarray(data, dtype=np.float64)
    return descriptor, step, params


def load_checkpoint(path) -> tuple[Network, int]:
    """Rebuild the stored network (all parameters trainable) and its step counter."""
    descriptor, step, params = _read_payload(path)
    import json

    net = network_from_descriptor(json.loads(descriptor))
    net.assign_params(params)
    return net, step


def load_checkpoint_into(net: Network, path) -> int:
    """Restore parameters into an existing network; architectures must match."""
    descriptor, step, params = _read_payload(path)
    if descriptor != net.descriptor_json():
        raise ArchitectureMismatchError(
            f"{path}: checkpoint architecture {descriptor} does not match "
            f"target {net.descriptor_json()}")
    net.assign_params(params)
    return step
