"""
8-bit binary PGM (P5) reading and writing
"""

from pathlib import Path

import numpy as np

from .errors import DimensionError, FormatError
from .file_handlers import atomic_write_bytes


def to_uint8(image: np.ndarray) -> np.ndarray:
    """Round and clamp to the displayable 0..255 range"""
    return np.clip(np.rint(np.asarray(image, dtype=np.float64)), 0, 255).astype(np.uint8)


def write_pgm(path, image: np.ndarray) -> Path:
    image = np.asarray(image)
    if image.ndim == 3 and image.shape[0] == 1:
        image = image[0]
    if image.ndim != 2:
        raise DimensionError(f"PGM needs a single-channel image, got shape {image.shape}")
    h, w = image.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    return atomic_write_bytes(path, header + to_uint8(image).tobytes())


def read_pgm(path) -> np.ndarray:
    """Read a P5 file into a float32 [H, W] array"""
    raw = Path(path).read_bytes()
    if raw[:2] != b"P5":
        raise FormatError("not a binary PGM (missing P5 magic)", offset=0, path=str(path))
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated PGM header", offset=pos, path=str(path))
        try:
            tokens.append(int(raw[start:pos]))
        except ValueError:
            raise FormatError("non-numeric PGM header field", offset=start, path=str(path))
    pos += 1
    w, h, maxval = tokens
    if maxval != 255:
        raise FormatError(f"only 8-bit PGM supported, maxval={maxval}", offset=pos, path=str(path))
    if len(raw) - pos < w * h:
        raise FormatError(f"PGM pixel data truncated, need {w * h} bytes", offset=len(raw), path=str(path))
    data = np.frombuffer(raw, dtype=np.uint8, count=w * h, offset=pos)
    return data.reshape(h, w).astype(np.float32)
