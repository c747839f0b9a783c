"""Flat binary and text helpers shared by the persistence formats."""
import csv
import json
from pathlib import Path

import numpy as np

_LE = np.dtype("<f8")


def write_f64(path, array):
    """Write ``array`` as row-major little-endian float64 with no header."""
    np.ascontiguousarray(array, dtype=_LE).tofile(path)


def read_f64(path, shape=None):
    data = np.fromfile(path, dtype=_LE).astype(float)
    return data if shape is None else data.reshape(shape)


def fmt(value):
    """Fixed 9-significant-digit rendering used in every CSV/JSON artifact."""
    if value is None:
        return ""
    value = float(value)
    if not np.isfinite(value):
        return "nan" if np.isnan(value) else ("inf" if value > 0 else "-inf")
    return f"{value:.9g}"


def _rounded(obj):
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _rounded(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(fmt(v)) if np.isfinite(v) else None
    return obj


def write_json(path, obj):
    Path(path).write_text(json.dumps(_rounded(obj), indent=2, sort_keys=False) + "\n")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v
                             for v in row])
