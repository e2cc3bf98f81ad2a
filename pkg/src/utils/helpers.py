"""
Helper functions
"""

import re
from typing import List, Tuple

import numpy as np

from .errors import ConfigError

_SIZE_RE = re.compile(r"^\s*(\d+)\s*[xX×]\s*(\d+)\s*$")


def parse_size(text: str) -> Tuple[int, int]:
    """Parse 'HxW' (or a single integer for square images) into (H, W)"""
    if isinstance(text, (tuple, list)) and len(text) == 2:
        h, w = int(text[0]), int(text[1])
    else:
        text = str(text)
        match = _SIZE_RE.match(text)
        if match:
            h, w = int(match.group(1)), int(match.group(2))
        elif text.strip().isdigit():
            h = w = int(text.strip())
        else:
            raise ConfigError(f"invalid size {text!r}, expected HxW")
    if h < 2 or w < 2:
        raise ConfigError(f"invalid size {h}x{w}, both sides must be >= 2")
    return h, w


def derive_seeds(seed: int, count: int) -> List[int]:
    """Independent child seeds, stable for a given parent seed"""
    children = np.random.SeedSequence(int(seed)).spawn(int(count))
    return [int(c.generate_state(1, dtype=np.uint32)[0]) for c in children]


def format_elapsed(seconds: float) -> str:
    """Human-readable duration"""
    seconds = float(seconds)
    if seconds < 60:
        return f"{seconds:.1f}s"
    minutes, sec = divmod(int(round(seconds)), 60)
    if minutes < 60:
        return f"{minutes}m{sec:02d}s"
    hours, minutes = divmod(minutes, 60)
    return f"{hours}h{minutes:02d}m"
