"""Dynamic time warping distance and pairwise distance matrices."""
from dataclasses import dataclass

import numba
import numpy as np

from .errors import BandTooNarrow, EmptySeries, NonFiniteValue


@numba.njit(cache=True)
def _dtw_dp(a, b, band):
    n, m = a.size, b.size
    inf = np.inf
    prev = np.full(m + 1, inf)
    cur = np.full(m + 1, inf)
    prev[0] = 0.0
    for i in range(1, n + 1):
        cur[:] = inf
        lo = 1 if band < 0 else max(1, i - band)
        hi = m if band < 0 else min(m, i + band)
        for j in range(lo, hi + 1):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = abs(a[i - 1] - b[j - 1]) + best
        prev, cur = cur, prev
    return prev[m]


@numba.njit(cache=True)
def _dtw_pairwise(rows, band):
    m = rows.shape[0]
    d = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            d[i, j] = _dtw_dp(rows[i], rows[j], band)
            d[j, i] = d[i, j]
    return d


def _as_series(x, name):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise EmptySeries(f"{name} must be a non-empty 1-d series")
    if not np.all(np.isfinite(x)):
        raise NonFiniteValue(f"{name} contains non-finite values")
    return x


def dtw_distance(a, b, band=None):
    """DTW distance with absolute-difference cost and symmetric unit steps.

    ``band`` is an optional Sakoe-Chiba half-width restricting |i - j|.

    >>> dtw_distance([0, 0, 1], [0, 1])
    0.0
    """
    a, b = _as_series(a, "a"), _as_series(b, "b")
    if band is not None:
        band = int(band)
        if band < abs(a.size - b.size):
            raise BandTooNarrow(f"band {band} < length difference {abs(a.size - b.size)}")
    return float(_dtw_dp(a, b, -1 if band is None else band))


def znormalize(x):
    x = np.asarray(x, dtype=float)
    sd = x.std()
    return x - x.mean() if sd == 0 else (x - x.mean()) / sd


@dataclass(frozen=True)
class DistanceMatrix:
    d: np.ndarray
    series_ids: tuple

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] != len(self.series_ids):
            raise ValueError("distance matrix must be square and match series_ids")
        if not (np.all(np.isfinite(d)) and np.all(d >= 0)
                and np.array_equal(d, d.T) and np.all(np.diag(d) == 0)):
            raise ValueError("distance matrix must be finite, nonnegative, symmetric, zero-diagonal")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "series_ids", tuple(self.series_ids))

    @property
    def size(self):
        return self.d.shape[0]


def dtw_matrix(series, band=None, normalize=False, series_ids=None):
    """Pairwise DTW distances between the rows of ``series``."""
    rows = [_as_series(s, f"series[{i}]") for i, s in enumerate(series)]
    if normalize:
        rows = [np.ascontiguousarray(znormalize(r)) for r in rows]
    m = len(rows)
    if len({r.size for r in rows}) <= 1 and m:
        if band is not None and band < 0:
            raise BandTooNarrow("band must be nonnegative")
        d = _dtw_pairwise(np.vstack(rows), -1 if band is None else int(band))
    else:
        d = np.zeros((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                d[i, j] = d[j, i] = dtw_distance(rows[i], rows[j], band)
    ids = tuple(range(m)) if series_ids is None else tuple(series_ids)
    return DistanceMatrix(d, ids)
