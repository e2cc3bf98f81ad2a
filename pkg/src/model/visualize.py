"""
Export of the statistics SCGN computes internally

Local SD maps and SDGW gates are tiled channel by channel into 8-bit PGM
images; band weights go to JSON. Files per traced module i:

    sd_<i>.pgm      local standard deviation, min-max scaled per map
    gate_<i>.pgm    spatial gate, 0..1 mapped to 0..255
    trace.json      shapes, value ranges and every band weight vector
"""

import logging
import math
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from ..utils.constants import PIXEL_PEAK
from ..utils.errors import DimensionError
from ..utils.file_handlers import ensure_dir, write_json
from ..utils.pgm import write_pgm
from .scgn import Trace

logger = logging.getLogger(__name__)

TRACE_INDEX = "trace.json"


def tile_channels(maps: np.ndarray, columns: Optional[int] = None, gap: int = 1) -> np.ndarray:
    """[C,H,W] (or [1,C,H,W]) -> one 2-D mosaic, row-major, gap pixels left at zero"""
    maps = np.asarray(maps, dtype=np.float64)
    if maps.ndim == 4:
        maps = maps[0]
    if maps.ndim != 3:
        raise DimensionError(f"tile_channels needs [C,H,W] maps, got shape {maps.shape}")
    c, h, w = maps.shape
    columns = columns or int(math.ceil(math.sqrt(c)))
    rows = int(math.ceil(c / columns))
    mosaic = np.zeros((rows * h + (rows - 1) * gap, columns * w + (columns - 1) * gap))
    for i in range(c):
        r, col = divmod(i, columns)
        y, x = r * (h + gap), col * (w + gap)
        mosaic[y:y + h, x:x + w] = maps[i]
    return mosaic


def _scaled(maps: np.ndarray) -> np.ndarray:
    lo, hi = float(maps.min()), float(maps.max())
    if hi <= lo:
        return np.zeros_like(maps, dtype=np.float64)
    return (maps - lo) / (hi - lo) * PIXEL_PEAK


def _summary(kind: str, index: int, arr: np.ndarray, file: Optional[str]) -> Dict:
    entry = {"kind": kind, "index": index, "shape": list(arr.shape),
             "min": float(arr.min()), "max": float(arr.max()), "mean": float(arr.mean())}
    if file:
        entry["file"] = file
    return entry


def write_trace(trace: Trace, out_dir) -> Path:
    """Write every map and weight vector of `trace` under out_dir; returns the index path"""
    out = ensure_dir(out_dir)
    entries: List[Dict] = []
    for i, sd in enumerate(trace.sd_maps):
        name = f"sd_{i:02d}.pgm"
        write_pgm(out / name, tile_channels(_scaled(sd)))
        entries.append(_summary("local_sd", i, sd, name))
    for i, gate in enumerate(trace.gates):
        name = f"gate_{i:02d}.pgm"
        write_pgm(out / name, tile_channels(np.asarray(gate, dtype=np.float64) * PIXEL_PEAK))
        entries.append(_summary("sdgw_gate", i, gate, name))
    weights = []
    for i, w in enumerate(trace.band_weights):
        weights.append([float(v) for v in np.asarray(w).reshape(-1)])
        entries.append(_summary("band_weight", i, w, None))

    index = write_json(out / TRACE_INDEX, {"maps": entries, "band_weights": weights})
    logger.info(f"Trace written to {out}: {len(trace.sd_maps)} SD maps, {len(trace.gates)} gates, "
                f"{len(weights)} band weight vectors")
    return index
