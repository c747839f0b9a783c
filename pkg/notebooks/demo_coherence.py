"""
Spatial coherence of seasonal rainfall
======================================

var(SAI) and the spatial degrees of freedom summarise how much a set of
locations vary together from one rainy season to the next.
"""

# %%
# A toy daily rainfall field: a regional weather factor shared by every
# location plus local noise decides whether it rains, and how much.
import numpy as np

from eofcast.coherence import coherence_table, default_groups, dof, seasonal_series, var_sai
from eofcast.grid import from_arrays
from eofcast.synthetic import daily_dates

rng = np.random.default_rng(0)
dates = daily_dates("1990-01-01", "2019-12-31")
n = 30
lon = -72.0 + 0.25 * (np.arange(n) % 6)
lat = -30.0 - 0.25 * (np.arange(n) // 6)
elev = np.linspace(100, 2500, n)
shared = rng.normal(size=dates.size)
weight = np.linspace(0.9, 0.2, n)[:, None]           # coherence fades southward
latent = weight * shared + np.sqrt(1 - weight ** 2) * rng.normal(size=(n, dates.size))
rain = np.where(latent > 0.8, rng.gamma(0.8, 8.0, latent.shape), 0.0)
field = from_arrays(lon, lat, rain, dates, elev)

# %%
# Seasonal statistics, one value per year and location: rainfall amount,
# intensity (mm per wet day) and frequency of wet days in May-August.
for statistic in ("RAm", "RI", "RF"):
    annual = seasonal_series(field, statistic)
    print(statistic, annual.values.shape, "first year, first location:",
          round(float(annual.values[0, 0]), 3))

# %%
# var(SAI) runs from about 1/m for unrelated locations to 1 for perfectly
# coherent ones.  DOF runs the other way, from m down to 1.
annual = seasonal_series(field, "RAm")
north, south = annual.select(np.arange(6)), annual.select(np.arange(24, 30))
print("north: var(SAI) %.3f  DOF %.2f" % (var_sai(north), dof(north)))
print("south: var(SAI) %.3f  DOF %.2f" % (var_sai(south), dof(south)))

# %%
# The table used by the pipeline: all locations, altitude classes and
# (here) two clusters split at the middle row.
labels = np.where(np.arange(n) < n // 2, 1, 2)
for row in coherence_table(field, default_groups(field, labels)):
    print(row)
