"""
NUCTENS1 tensor container

Layout: 8-byte magic, JSON header padded with spaces and terminated by a
newline so that the payload starts on a 64-byte boundary, then the raw
little-endian float32 buffer.
"""

import json
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from ..utils.constants import TENSOR_ALIGN, TENSOR_MAGIC
from ..utils.errors import FormatError
from ..utils.file_handlers import atomic_write_bytes
from .tensor import Tensor

MAX_HEADER = 1 << 20


def encode_tensor(t: Tensor, name: str = "") -> bytes:
    header = json.dumps({
        "shape": [int(s) for s in t.shape],
        "dtype": "f32",
        "byte_order": "LE",
        "name": name,
    }, sort_keys=True).encode("utf-8")
    used = len(TENSOR_MAGIC) + len(header) + 1
    padding = (-used) % TENSOR_ALIGN
    head = TENSOR_MAGIC + header + b" " * padding + b"\n"
    return head + np.ascontiguousarray(t.data, dtype="<f4").tobytes()


def decode_tensor(raw: bytes, path: Optional[str] = None) -> Tuple[Tensor, str]:
    if raw[:len(TENSOR_MAGIC)] != TENSOR_MAGIC:
        raise FormatError("bad magic, not a tensor container", offset=0, path=path)
    end = raw.find(b"\n", len(TENSOR_MAGIC), len(TENSOR_MAGIC) + MAX_HEADER)
    if end < 0:
        raise FormatError("header terminator not found", offset=len(TENSOR_MAGIC), path=path)
    offset = end + 1
    if offset % TENSOR_ALIGN:
        raise FormatError(f"payload not aligned to {TENSOR_ALIGN} bytes", offset=offset, path=path)
    try:
        header = json.loads(raw[len(TENSOR_MAGIC):end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError(f"unreadable header: {e}", offset=len(TENSOR_MAGIC), path=path) from e
    if not isinstance(header, dict) or "shape" not in header:
        raise FormatError("header lacks shape", offset=len(TENSOR_MAGIC), path=path)
    if header.get("dtype") != "f32" or header.get("byte_order") != "LE":
        raise FormatError(f"unsupported dtype/byte order {header.get('dtype')}/{header.get('byte_order')}",
                          offset=len(TENSOR_MAGIC), path=path)
    shape = header["shape"]
    if not isinstance(shape, list) or not all(isinstance(s, int) and s >= 0 for s in shape):
        raise FormatError(f"invalid shape {shape!r}", offset=len(TENSOR_MAGIC), path=path)
    count = int(np.prod(shape, dtype=np.int64)) if shape else 1
    expected = offset + 4 * count
    if len(raw) < expected:
        raise FormatError(f"payload truncated, expected {expected} bytes, got {len(raw)}", offset=len(raw), path=path)
    if len(raw) > expected:
        raise FormatError("trailing bytes after payload", offset=expected, path=path)
    data = np.frombuffer(raw, dtype="<f4", count=count, offset=offset).astype(np.float32).reshape(shape)
    return Tensor(data, dtype=np.float32), str(header.get("name", ""))


def save_tensor(path, t: Tensor, name: str = "") -> Path:
    return atomic_write_bytes(path, encode_tensor(t, name))


def load_tensor(path) -> Tuple[Tensor, str]:
    path = Path(path)
    return decode_tensor(path.read_bytes(), path=str(path))
