"""
Clustering locations by DTW distance
====================================

Series that share a regime but drift slightly in phase are close under
dynamic time warping.  Ward linkage on the DTW matrix recovers the
regimes, and each cluster is summarised by its medoid.
"""

# %%
import numpy as np

from eofcast.clustering import assign_grid, cluster_hierarchical, partition_similarity
from eofcast.dtw import dtw_distance, dtw_matrix
from eofcast.grid import Location
from eofcast.synthetic import regime_series

# %%
# DTW allows local stretching: a shifted copy of a pulse is at distance 0,
# while the plain Euclidean distance sees two full mismatches.
a = np.array([0, 0, 1, 0, 0, 0], float)
b = np.array([0, 0, 0, 1, 0, 0], float)
print("dtw:", dtw_distance(a, b), " euclidean:", np.linalg.norm(a - b) ** 2)

# %%
# A Sakoe-Chiba band limits how far the alignment may stray from the diagonal.
print("dtw, band 0:", dtw_distance(a, b, band=0), " band 1:", dtw_distance(a, b, band=1))

# %%
# Four regimes, ten members each.
series, truth = regime_series(10, 4, 80, seed=0)
dist = dtw_matrix(series, band=10)
model = cluster_hierarchical(dist, 4)
print("labels:", model.labels)
print("ARI against the planted regimes:", partition_similarity(model.labels, truth))
print("medoids (series index per cluster):", model.medoid_ids)

# %%
# The same merge tree can be cut at other k without recomputing distances.
for k in (2, 3, 5):
    print(k, "clusters:", np.bincount(model.with_k(k).labels)[1:])

# %%
# Labels can be spread from sampled stations to a full grid by nearest
# great-circle neighbour.
samples = [Location(i, -72.0 + 0.5 * i, -30.0) for i in range(4)]
grid = [Location(10 + i, -72.0 + 0.2 * i, -30.1) for i in range(8)]
print("grid labels:", assign_grid(grid, samples, [1, 1, 2, 2]))
