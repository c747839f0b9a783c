"""Ward hierarchical clustering on DTW distances, medoids, region assignment.

Ward linkage is run through the Lance-Williams recurrence on squared
dissimilarities (the "Ward.D2" convention), which is how it is usually
paired with a non-Euclidean distance such as DTW.
"""
from dataclasses import dataclass

import numpy as np

from .dtw import DistanceMatrix, dtw_matrix
from .errors import LengthMismatch

EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class ClusterModel:
    merge_history: tuple      # (a, b, height, size); new clusters numbered m, m+1, ...
    labels: np.ndarray        # 1..k
    k: int
    medoid_ids: tuple         # series index of each cluster's medoid, cluster order
    distance: DistanceMatrix

    def members(self, c):
        return np.flatnonzero(self.labels == c)

    def with_k(self, k):
        labels = cut_tree(self.merge_history, self.distance.size, k)
        return ClusterModel(self.merge_history, labels, k,
                            medoids(self.distance, labels), self.distance)

    def as_dict(self):
        return {"k": self.k, "series_ids": list(self.distance.series_ids),
                "labels": [int(x) for x in self.labels],
                "medoid_ids": [int(x) for x in self.medoid_ids],
                "merge_history": [[int(a), int(b), float(h), int(s)]
                                  for a, b, h, s in self.merge_history]}


def ward_linkage(d):
    """Agglomerative Ward merges for the square dissimilarity matrix ``d``.

    Returns a list of ``(a, b, height, size)`` with ``a < b`` cluster ids
    in scipy's numbering convention.
    """
    d = np.asarray(d, dtype=float)
    m = d.shape[0]
    d2 = d ** 2
    np.fill_diagonal(d2, np.inf)
    size = np.ones(m)
    ids = np.arange(m)
    active = np.ones(m, dtype=bool)
    history = []
    for step in range(m - 1):
        masked = np.where(active[:, None] & active[None, :], d2, np.inf)
        flat = int(np.argmin(masked))
        i, j = divmod(flat, m)
        i, j = min(i, j), max(i, j)
        height = np.sqrt(d2[i, j])
        ni, nj = size[i], size[j]
        nk = size
        updated = ((ni + nk) * d2[i] + (nj + nk) * d2[j] - nk * d2[i, j]) / (ni + nj + nk)
        a, b = sorted((ids[i], ids[j]))
        history.append((int(a), int(b), float(height), int(ni + nj)))
        # cluster i absorbs j
        d2[i, :] = updated
        d2[:, i] = updated
        d2[i, i] = np.inf
        active[j] = False
        d2[j, :] = np.inf
        d2[:, j] = np.inf
        size[i] = ni + nj
        ids[i] = m + step
    return history


def cut_tree(history, m, k):
    """Flat labels 1..k after undoing the last k-1 merges.

    Clusters are numbered in order of their lowest member index.
    """
    if not 1 <= k <= m:
        raise ValueError(f"k must lie in [1, {m}], got {k}")
    parent = list(range(2 * m - 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for step, (a, b, _, _) in enumerate(history[:m - k]):
        parent[find(a)] = m + step
        parent[find(b)] = m + step
    roots = [find(i) for i in range(m)]
    relabel = {}
    for r in roots:
        relabel.setdefault(r, len(relabel) + 1)
    return np.array([relabel[r] for r in roots])


def medoids(dist, labels):
    """Per cluster (1..k order), the member with least summed distance to its cluster."""
    d = dist.d if isinstance(dist, DistanceMatrix) else np.asarray(dist)
    labels = np.asarray(labels)
    out = []
    for c in range(1, labels.max() + 1):
        members = np.flatnonzero(labels == c)
        cost = d[np.ix_(members, members)].sum(axis=1)
        out.append(int(members[np.argmin(cost)]))
    return tuple(out)


def cluster_hierarchical(dist, k):
    """Ward clustering of a :class:`DistanceMatrix` cut at ``k`` clusters."""
    if not 1 <= k <= dist.size:
        raise ValueError(f"k must lie in [1, {dist.size}], got {k}")
    history = tuple(ward_linkage(dist.d))
    labels = cut_tree(history, dist.size, k)
    return ClusterModel(history, labels, k, medoids(dist, labels), dist)


def cluster_series(series, k, band=None, normalize=False, series_ids=None):
    return cluster_hierarchical(dtw_matrix(series, band, normalize, series_ids), k)


def haversine(lon1, lat1, lon2, lat2):
    """Great-circle distance in km; arguments broadcast."""
    lon1, lat1, lon2, lat2 = map(np.radians, (lon1, lat1, lon2, lat2))
    a = (np.sin((lat2 - lat1) / 2) ** 2
         + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2)
    return 2 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def assign_grid(grid, samples, labels, tol_km=1e-9):
    """Label every grid location with the label of its nearest sample.

    Equidistant samples (within ``tol_km``) resolve to the lowest label.
    """
    if not samples:
        raise ValueError("need at least one sample location")
    labels = np.asarray(labels)
    if labels.size != len(samples):
        raise LengthMismatch("labels must align with samples")
    glon = np.array([g.lon for g in grid])[:, None]
    glat = np.array([g.lat for g in grid])[:, None]
    slon = np.array([s.lon for s in samples])[None, :]
    slat = np.array([s.lat for s in samples])[None, :]
    dist = haversine(glon, glat, slon, slat)
    nearest = dist <= dist.min(axis=1, keepdims=True) + tol_km
    candidates = np.where(nearest, labels[None, :], np.iinfo(np.int64).max)
    return candidates.min(axis=1)


def partition_similarity(labels_a, labels_b):
    """Adjusted Rand index between two flat partitions."""
    a, b = np.asarray(labels_a), np.asarray(labels_b)
    if a.shape != b.shape:
        raise LengthMismatch(f"partitions of different lengths {a.size} and {b.size}")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1))
    np.add.at(table, (ia, ib), 1)

    def pairs(x):
        return (x * (x - 1) / 2).sum()

    n = a.size
    index = pairs(table)
    row, col = pairs(table.sum(axis=1)), pairs(table.sum(axis=0))
    total = n * (n - 1) / 2
    expected = row * col / total if total else 0.0
    maximum = (row + col) / 2
    if maximum == expected:
        return 1.0
    return float((index - expected) / (maximum - expected))


def window_stability(field, windows, k, months=None, band=None, normalize=False):
    """Cluster each time window of ``field`` and compare consecutive partitions.

    Returns ``(models, ari)`` where ``ari[i]`` compares windows i and i+1.
    """
    from .grid import subset

    models = []
    for window in windows:
        sub = subset(field, window, months)
        models.append(cluster_series(sub.values, k, band, normalize))
    ari = [partition_similarity(x.labels, y.labels) for x, y in zip(models, models[1:])]
    return models, ari
