"""Maximal overlap discrete wavelet transform (MODWT) and its MRA.

Only the Haar filter ships.  Filtering is circular, so every series
length is admissible and the transform is shift-equivariant.
"""
from dataclasses import dataclass

import numpy as np

from .errors import SeriesTooShort

# MODWT-rescaled Haar taps (the DWT taps divided by sqrt(2)).
_FILTERS = {
    "haar": (np.array([0.5, -0.5]), np.array([0.5, 0.5])),
}


def _taps(name):
    try:
        return _FILTERS[name]
    except KeyError:
        raise ValueError(f"unsupported wavelet filter {name!r}") from None


@dataclass(frozen=True)
class ModwtCoefficients:
    wavelet: np.ndarray   # J x N, rows are W_1..W_J
    scaling: np.ndarray   # V_J, length N
    filter: str = "haar"

    @property
    def levels(self):
        return self.wavelet.shape[0]


@dataclass(frozen=True)
class MraDecomposition:
    """Additive multiresolution decomposition ``x = D_1 + ... + D_J + S_J``."""

    details: np.ndarray   # J x N
    smooth: np.ndarray    # length N
    filter: str = "haar"

    @property
    def levels(self):
        return self.details.shape[0]

    @property
    def components(self):
        """All components as a (J+1) x N array, details first, smooth last."""
        return np.vstack([self.details, self.smooth[None, :]])

    def reconstruct(self):
        return self.details.sum(axis=0) + self.smooth

    def boundary_mask(self):
        """True where a sample is touched by the circular wrap at the top level."""
        n = self.smooth.size
        width = min(n, 2 ** self.levels - 1)
        mask = np.zeros(n, dtype=bool)
        if width:
            mask[n - width:] = True
        return mask


def _forward_step(v, h, g, j):
    """One pyramid step: level j-1 scaling coefficients to level j."""
    shift = 2 ** (j - 1)
    w = np.zeros_like(v)
    vn = np.zeros_like(v)
    for l in range(h.size):
        lagged = np.roll(v, l * shift)          # v[(t - l*2^(j-1)) mod N]
        w += h[l] * lagged
        vn += g[l] * lagged
    return w, vn


def _inverse_step(w, v, h, g, j):
    shift = 2 ** (j - 1)
    out = np.zeros_like(v)
    for l in range(h.size):
        out += h[l] * np.roll(w, -l * shift) + g[l] * np.roll(v, -l * shift)
    return out


def modwt(x, levels, filter="haar"):
    """Pyramid MODWT of ``x`` down to ``levels``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise SeriesTooShort(f"MODWT needs a 1-d series of length >= 2, got shape {x.shape}")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    h, g = _taps(filter)
    v = x.copy()
    ws = []
    for j in range(1, levels + 1):
        w, v = _forward_step(v, h, g, j)
        ws.append(w)
    return ModwtCoefficients(np.vstack(ws), v, filter)


def imodwt(coeffs):
    h, g = _taps(coeffs.filter)
    v = coeffs.scaling.copy()
    for j in range(coeffs.levels, 0, -1):
        v = _inverse_step(coeffs.wavelet[j - 1], v, h, g, j)
    return v


def modwt_mra(x, levels=10, filter="haar"):
    """Decompose ``x`` into ``levels`` detail series and one smooth.

    Each detail D_j is obtained by synthesising W_j alone (all other
    coefficients zeroed); S_J likewise from V_J.  The components are
    zero-phase and sum back to ``x`` to rounding error.

    >>> mra = modwt_mra([1.0, 3.0], levels=1)
    >>> mra.details.tolist(), mra.smooth.tolist()
    ([[-1.0, 1.0]], [2.0, 2.0])
    """
    coeffs = modwt(x, levels, filter)
    h, g = _taps(filter)
    n = coeffs.scaling.size
    zero = np.zeros(n)

    details = np.empty((levels, n))
    for j in range(1, levels + 1):
        v = _inverse_step(coeffs.wavelet[j - 1], zero, h, g, j)
        for i in range(j - 1, 0, -1):
            v = _inverse_step(zero, v, h, g, i)
        details[j - 1] = v

    smooth = coeffs.scaling.copy()
    for j in range(levels, 0, -1):
        smooth = _inverse_step(zero, smooth, h, g, j)
    return MraDecomposition(details, smooth, filter)
