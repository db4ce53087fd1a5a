"""Binary container shared by count, weighted and dense models.

Layout (little endian)::

    b"DSMF"  u16 version  u16 kind  u32 n_sections
    n_sections × section:
        u16 name_len, name (utf-8)
        u16 dtype_len, dtype (numpy dtype.str, or "json")
        u8 ndim, ndim × u64 shape
        u64 nbytes, payload
    u32 crc32 of everything above

Arrays are stored raw in C order. The "meta" section is a JSON object.
"""
import json
import struct
import zlib
from pathlib import Path
from typing import Any, Dict, Mapping, Tuple

import numpy as np

from app.utils.enums import ModelKind
from app.utils.error_handling import ModelFormatError
from app.utils.logger import logger

MAGIC = b"DSMF"
VERSION = 1
_HEADER = struct.Struct("<4sHHI")
_U16 = struct.Struct("<H")
_U8 = struct.Struct("<B")
_U64 = struct.Struct("<Q")
_U32 = struct.Struct("<I")


def _pack_section(name: str, dtype: str, shape: Tuple[int, ...], payload: bytes) -> bytes:
    name_b = name.encode("utf-8")
    dtype_b = dtype.encode("ascii")
    parts = [_U16.pack(len(name_b)), name_b, _U16.pack(len(dtype_b)), dtype_b, _U8.pack(len(shape))]
    parts.extend(_U64.pack(dim) for dim in shape)
    parts.append(_U64.pack(len(payload)))
    parts.append(payload)
    return b"".join(parts)


def write_container(path, kind: ModelKind, meta: Mapping[str, Any], arrays: Mapping[str, np.ndarray]) -> None:
    sections = [_pack_section("meta", "json", (), json.dumps(meta, sort_keys=True).encode("utf-8"))]
    for name in sorted(arrays):
        arr = np.ascontiguousarray(arrays[name])
        sections.append(_pack_section(name, arr.dtype.str, arr.shape, arr.tobytes()))

    body = _HEADER.pack(MAGIC, VERSION, kind.value, len(sections)) + b"".join(sections)
    Path(path).write_bytes(body + _U32.pack(zlib.crc32(body)))
    logger.debug("Wrote %s container %s (%d bytes)", kind.name, path, len(body) + 4)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, n: int, what: str) -> bytes:
        if self.offset + n > len(self.data):
            raise ModelFormatError(f"Truncated model file: need {n} bytes for {what}, "
                                   f"{len(self.data) - self.offset} left", self.offset)
        chunk = self.data[self.offset:self.offset + n]
        self.offset += n
        return chunk

    def unpack(self, fmt: struct.Struct, what: str):
        return fmt.unpack(self.take(fmt.size, what))


def read_container(path, expected: ModelKind = None) -> Tuple[ModelKind, Dict[str, Any], Dict[str, np.ndarray]]:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size + _U32.size:
        raise ModelFormatError(f"Model file {path} too short ({len(data)} bytes)", len(data))

    reader = _Reader(data[:-_U32.size])
    magic, version, kind_code, n_sections = reader.unpack(_HEADER, "header")
    if magic != MAGIC:
        raise ModelFormatError(f"Bad magic {magic!r} in {path}", 0)
    if version != VERSION:
        raise ModelFormatError(f"Unsupported container version {version}", 4)
    try:
        kind = ModelKind(kind_code)
    except ValueError:
        raise ModelFormatError(f"Unknown model kind {kind_code}", 6) from None
    if expected is not None and kind is not expected:
        raise ModelFormatError(f"{path} holds a {kind.name} model, expected {expected.name}", 6)

    meta: Dict[str, Any] = {}
    arrays: Dict[str, np.ndarray] = {}
    for _ in range(n_sections):
        start = reader.offset
        (name_len,) = reader.unpack(_U16, "section name length")
        name = reader.take(name_len, "section name").decode("utf-8", errors="replace")
        (dtype_len,) = reader.unpack(_U16, f"dtype length of '{name}'")
        dtype = reader.take(dtype_len, f"dtype of '{name}'").decode("ascii", errors="replace")
        (ndim,) = reader.unpack(_U8, f"ndim of '{name}'")
        shape = tuple(reader.unpack(_U64, f"shape of '{name}'")[0] for _ in range(ndim))
        (nbytes,) = reader.unpack(_U64, f"size of '{name}'")
        payload = reader.take(nbytes, f"payload of '{name}'")
        if dtype == "json":
            try:
                meta = json.loads(payload.decode("utf-8"))
            except ValueError as exc:
                raise ModelFormatError(f"Corrupt metadata section: {exc}", start) from exc
            continue
        try:
            arrays[name] = np.frombuffer(payload, dtype=np.dtype(dtype)).reshape(shape).copy()
        except (TypeError, ValueError) as exc:
            raise ModelFormatError(f"Corrupt section '{name}': {exc}", start) from exc

    if reader.offset != len(reader.data):
        raise ModelFormatError("Trailing bytes after last section", reader.offset)
    (stored_crc,) = _U32.unpack(data[-_U32.size:])
    if zlib.crc32(reader.data) != stored_crc:
        raise ModelFormatError(f"Checksum mismatch in {path}", len(data) - _U32.size)
    return kind, meta, arrays


def peek_kind(path) -> ModelKind:
    with open(path, "rb") as handle:
        data = handle.read(_HEADER.size)
    if len(data) < _HEADER.size or data[:4] != MAGIC:
        raise ModelFormatError(f"{path} is not a model container", 0)
    try:
        return ModelKind(_HEADER.unpack(data)[2])
    except ValueError:
        raise ModelFormatError("Unknown model kind", 6) from None
