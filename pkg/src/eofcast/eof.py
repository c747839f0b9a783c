"""EOF / PC factorisation of a field via the SVD of the centred data.

Rows of the n x p data matrix are locations, columns are time steps.
The field is centred across locations at each time step and scaled by
1/sqrt(n), so that ``Z.T @ Z`` is the p x p temporal covariance matrix
and the right singular vectors of Z are the temporal EOFs.
"""
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NonFiniteValue, ShapeMismatch, SvdFailure
from .io import read_f64, write_f64


@dataclass(frozen=True)
class EofModel:
    mean_vector: np.ndarray      # length p, cross-location mean at each time
    u: np.ndarray                # n x K
    singular_values: np.ndarray  # length K, nonincreasing
    v: np.ndarray                # p x K, temporal EOFs in columns
    n_locations: int
    variance_shares: np.ndarray  # d_k**2 / sum(d**2)

    @property
    def rank(self):
        """K = min(n, p)."""
        return self.singular_values.size

    @property
    def n_times(self):
        return self.v.shape[0]

    @property
    def eigenvalues(self):
        """Eigenvalues of the temporal covariance matrix, ``d_k**2``."""
        return self.singular_values ** 2

    def explained_variance(self, k):
        return float(self.variance_shares[:k].sum())


@dataclass(frozen=True)
class SpatialCoefficients:
    alpha: np.ndarray   # n x k_used
    k_used: int


def center_scale(x):
    """Return ``(Z, xbar)`` with ``xbar = X.T @ 1 / n`` and ``Z = (X - 1 xbar.T) / sqrt(n)``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or 0 in x.shape:
        raise ShapeMismatch(f"expected a non-empty n x p matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteValue("field contains non-finite values")
    n = x.shape[0]
    xbar = x.mean(axis=0)
    return (x - xbar) / np.sqrt(n), xbar


def covariance_matrix(x):
    """Temporal covariance ``X.T H X / n`` built from the centering matrix H.

    Explicit O(n^2) construction, intended as an independent check of
    :func:`center_scale` on small inputs.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    h = np.eye(n) - np.ones((n, n)) / n
    return x.T @ h @ x / n


def _fix_signs(u, v):
    # make the largest-magnitude entry of every EOF positive
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[idx, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs, v * signs


def svd_eof(z, mean_vector=None):
    """Factorise the centred, scaled field ``z`` into an :class:`EofModel`.

    ``mean_vector`` is carried along for reconstruction; it defaults to
    zeros (i.e. ``z`` is treated as the full field).
    """
    z = np.asarray(z, dtype=float)
    if z.ndim != 2 or 0 in z.shape:
        raise ShapeMismatch(f"expected a non-empty n x p matrix, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise NonFiniteValue("input contains non-finite values")
    n, p = z.shape
    try:
        u, d, vt = np.linalg.svd(z, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(f"SVD did not converge for a {n}x{p} matrix") from exc

    order = np.argsort(-d, kind="stable")
    u, d, v = u[:, order], d[order], vt[order].T
    u, v = _fix_signs(u, v)

    lam = d ** 2
    total = lam.sum()
    shares = lam / total if total > 0 else np.zeros_like(lam)
    if mean_vector is None:
        mean_vector = np.zeros(p)
    return EofModel(np.asarray(mean_vector, dtype=float), u, d, v, n, shares)


def decompose(x):
    """Centre ``x`` and factorise it; shorthand for center_scale + svd_eof."""
    z, xbar = center_scale(x)
    return svd_eof(z, xbar)


def truncate_rank(model, threshold=0.8):
    """Smallest k whose cumulative variance share reaches ``threshold``."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
    cumulative = np.cumsum(model.variance_shares)
    if cumulative[-1] == 0:
        return 1
    k = int(np.searchsorted(cumulative, threshold - 1e-12, side="left")) + 1
    return min(max(k, 1), model.rank)


def _check_k(model, k, allow_zero=False):
    lo = 0 if allow_zero else 1
    if not lo <= k <= model.rank:
        raise ValueError(f"k must lie in [{lo}, {model.rank}], got {k}")


def spatial_coefficients(model, k):
    """Principal components ``alpha = U_k D_k`` (one row per location)."""
    _check_k(model, k)
    return SpatialCoefficients(model.u[:, :k] * model.singular_values[:k], k)


def reconstruct(model, k):
    """Rank-``k`` approximation of the original field; ``k = 0`` gives the mean field."""
    _check_k(model, k, allow_zero=True)
    n = model.n_locations
    low_rank = np.sqrt(n) * (model.u[:, :k] * model.singular_values[:k]) @ model.v[:, :k].T
    return low_rank + model.mean_vector[None, :]


def reconstruct_extended(model, k, v_ext, h=None):
    """Reconstruct the field over ``p + h`` steps from extended EOFs.

    ``v_ext`` is (p + h) x k: its first p rows must be the model's EOFs,
    the remaining h rows their forecasts.  Forecast columns get the grand
    mean of the mean vector as their additive constant.
    """
    _check_k(model, k)
    v_ext = np.asarray(v_ext, dtype=float)
    p = model.n_times
    if v_ext.ndim != 2 or v_ext.shape[1] != k or v_ext.shape[0] < p:
        raise ShapeMismatch(f"v_ext must be (p + h) x {k} with p = {p}, got {v_ext.shape}")
    if h is None:
        h = v_ext.shape[0] - p
    if v_ext.shape[0] != p + h:
        raise ShapeMismatch(f"v_ext has {v_ext.shape[0]} rows, expected p + h = {p + h}")
    if not np.array_equal(v_ext[:p], model.v[:, :k]):
        raise ShapeMismatch("the first p rows of v_ext must equal the model EOFs")

    n = model.n_locations
    mean_ext = np.concatenate([model.mean_vector,
                               np.full(h, model.mean_vector.mean())])
    head = reconstruct(model, k)
    tail = np.sqrt(n) * (model.u[:, :k] * model.singular_values[:k]) @ v_ext[p:].T
    return np.hstack([head, tail + mean_ext[None, p:]])


def save_model(model, directory):
    """Write ``eof_meta.json`` plus ``u.f64le``, ``v.f64le``, ``d.f64le``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    n, p, k = model.n_locations, model.n_times, model.rank
    meta = {"n": n, "p": p, "K": k,
            "mean_vector": [float(f"{x:.17g}") for x in model.mean_vector],
            "variance_shares": [float(f"{x:.17g}") for x in model.variance_shares]}
    (directory / "eof_meta.json").write_text(json.dumps(meta) + "\n")
    write_f64(directory / "u.f64le", model.u)
    write_f64(directory / "v.f64le", model.v)
    write_f64(directory / "d.f64le", model.singular_values)


def load_model(directory):
    directory = Path(directory)
    meta = json.loads((directory / "eof_meta.json").read_text())
    n, p, k = meta["n"], meta["p"], meta["K"]
    return EofModel(np.array(meta["mean_vector"], dtype=float),
                    read_f64(directory / "u.f64le", (n, k)),
                    read_f64(directory / "d.f64le"),
                    read_f64(directory / "v.f64le", (p, k)),
                    n, np.array(meta["variance_shares"], dtype=float))
