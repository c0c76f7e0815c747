"""Flat binary container of named tensors.

Layout (all integers little-endian)::

    magic        8 bytes   b"CMTRATNS"
    version      uint32    FORMAT_VERSION
    count        uint32    number of tensors
    per tensor:
      name_len   uint32
      name       name_len bytes, UTF-8
      ndim       uint32
      dims       ndim x uint64
      data       prod(dims) x float64, row-major

Values are always stored at 64-bit precision; readers cast to the dtype they need.
"""

import logging
import struct
from collections.abc import Mapping
from pathlib import Path

import numpy as np

from src.errors import CheckpointError, IoError

logger = logging.getLogger(__name__)

MAGIC = b"CMTRATNS"
FORMAT_VERSION = 1

_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")


def encode_tensors(tensors: Mapping[str, np.ndarray]) -> bytes:
    """Serialize named tensors in insertion order."""
    parts = [MAGIC, _U32.pack(FORMAT_VERSION), _U32.pack(len(tensors))]
    for name, tensor in tensors.items():
        raw_name = name.encode("utf-8")
        array = np.ascontiguousarray(tensor, dtype="<f8")
        parts.append(_U32.pack(len(raw_name)))
        parts.append(raw_name)
        parts.append(_U32.pack(array.ndim))
        parts.extend(_U64.pack(dim) for dim in array.shape)
        parts.append(array.tobytes(order="C"))
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    def take(self, size: int) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            raise CheckpointError("tensor container is truncated")
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def u32(self) -> int:
        return _U32.unpack(self.take(_U32.size))[0]

    def u64(self) -> int:
        return _U64.unpack(self.take(_U64.size))[0]


def decode_tensors(data: bytes) -> dict[str, np.ndarray]:
    """Parse a container produced by encode_tensors.

    Raises:
        CheckpointError: On a bad magic, unsupported version, truncation or trailing bytes
    """
    reader = _Reader(data)
    if reader.take(len(MAGIC)) != MAGIC:
        raise CheckpointError("not a cmtra tensor container (bad magic)")
    version = reader.u32()
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"unsupported tensor container version {version}",
            detail=f"This build reads version {FORMAT_VERSION}",
        )
    tensors: dict[str, np.ndarray] = {}
    for _ in range(reader.u32()):
        try:
            name = reader.take(reader.u32()).decode("utf-8")
        except UnicodeDecodeError as e:
            raise CheckpointError(f"tensor name is not UTF-8: {e}") from e
        if name in tensors:
            raise CheckpointError(f"duplicate tensor name {name!r}")
        shape = tuple(reader.u64() for _ in range(reader.u32()))
        count = int(np.prod(shape, dtype=np.int64))
        raw = reader.take(count * 8)
        tensors[name] = np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(shape)
    if reader.offset != len(data):
        raise CheckpointError(f"{len(data) - reader.offset} trailing bytes after the last tensor")
    return tensors


def save_tensors(path: Path | str, tensors: Mapping[str, np.ndarray]) -> None:
    path = Path(path)
    try:
        path.write_bytes(encode_tensors(tensors))
    except OSError as e:
        raise IoError(f"cannot write checkpoint {path}: {e}") from e
    logger.debug("Wrote %d tensors to %s", len(tensors), path)


def load_tensors(path: Path | str) -> dict[str, np.ndarray]:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise IoError(f"cannot read checkpoint {path}: {e}") from e
    return decode_tensors(data)
