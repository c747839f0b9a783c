"""Seasonal rainfall statistics and spatial-coherence scores.

Two scores summarise how coherently a group of locations varies from
year to year: the variance of the standardized anomaly index, between
1/m (independent locations) and 1 (perfectly correlated), and the
number of spatial degrees of freedom, between 1 and m.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ZeroVariance
from .io import write_csv

STATISTICS = ("RAm", "RI", "RF")
MJJA = (5, 6, 7, 8)
ALTITUDE_CLASSES = ("0-500m", "500-1500m", ">1500m")


@dataclass(frozen=True)
class AnnualSeriesMatrix:
    values: np.ndarray     # years x locations
    years: tuple
    statistic: str
    location_ids: tuple

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(self.years), len(self.location_ids)):
            raise ValueError(f"values shape {values.shape} does not match "
                             f"{len(self.years)} years x {len(self.location_ids)} locations")
        if np.any(np.diff(self.years) <= 0):
            raise ValueError("years must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("annual series must be finite")
        object.__setattr__(self, "values", values)

    def select(self, columns):
        columns = np.asarray(columns, dtype=int)
        return AnnualSeriesMatrix(self.values[:, columns], self.years, self.statistic,
                                  tuple(self.location_ids[c] for c in columns))


def seasonal_series(field, statistic="RAm", months=MJJA, wet_threshold=1.0):
    """One value per (year, location) of a seasonal rainfall statistic.

    RAm is the seasonal total, RI the mean amount on wet days (0 when
    there are none), RF the fraction of season days that are wet.  A day
    is wet when its value exceeds ``wet_threshold``.
    """
    if statistic not in STATISTICS:
        raise ValueError(f"statistic must be one of {STATISTICS}, got {statistic!r}")
    months = sorted(set(months))
    if not months:
        raise ValueError("months must be non-empty")
    if wet_threshold <= 0:
        raise ValueError("wet_threshold must be positive")

    in_season = np.isin(field.time.months, months)
    years = field.time.years
    season_years = np.unique(years[in_season])
    out = np.empty((season_years.size, field.n))
    for row, year in enumerate(season_years):
        x = field.values[:, in_season & (years == year)]
        wet = x > wet_threshold
        n_wet = wet.sum(axis=1)
        if statistic == "RAm":
            out[row] = x.sum(axis=1)
        elif statistic == "RI":
            wet_total = np.where(wet, x, 0.0).sum(axis=1)
            out[row] = np.divide(wet_total, n_wet, out=np.zeros(field.n), where=n_wet > 0)
        else:
            out[row] = n_wet / x.shape[1]
    return AnnualSeriesMatrix(out, tuple(int(y) for y in season_years), statistic,
                              tuple(loc.id for loc in field.locations))


def _standardized(annual):
    x = annual.values if isinstance(annual, AnnualSeriesMatrix) else np.asarray(annual, float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need at least two years of data")
    sd = x.std(axis=0, ddof=1)
    if np.any(sd == 0):
        bad = int(np.flatnonzero(sd == 0)[0])
        raise ZeroVariance(f"location column {bad} has zero interannual variance")
    return (x - x.mean(axis=0)) / sd


def var_sai(annual):
    """Interannual variance of the standardized anomaly index."""
    return float(_standardized(annual).mean(axis=1).var(ddof=1))


def dof(annual):
    """Spatial degrees of freedom ``m**2 / sum(lambda**2)`` of the correlation matrix."""
    z = _standardized(annual)
    m = z.shape[1]
    corr = z.T @ z / (z.shape[0] - 1)
    lam = np.clip(np.linalg.eigvalsh(corr), 0.0, None)
    return float(m ** 2 / np.sum(lam ** 2))


def altitude_class(elev):
    """Altitude band labels for an array of elevations in metres."""
    elev = np.asarray(elev, dtype=float)
    return np.where(elev < 500, ALTITUDE_CLASSES[0],
                    np.where(elev <= 1500, ALTITUDE_CLASSES[1], ALTITUDE_CLASSES[2]))


def coherence_table(field, groups, statistics=STATISTICS, months=MJJA, wet_threshold=1.0):
    """Scores per (group, statistic).

    ``groups`` maps a group name to the row indices of ``field`` it holds.
    Groups that are too small or contain a constant location get ``None``
    scores rather than aborting the table.
    """
    rows = []
    annual = {s: seasonal_series(field, s, months, wet_threshold) for s in statistics}
    for name, index in groups.items():
        index = np.asarray(index, dtype=int)
        for s in statistics:
            sub = annual[s].select(index)
            try:
                row = (str(name), int(index.size), s, dof(sub), var_sai(sub))
            except (ZeroVariance, ValueError):
                row = (str(name), int(index.size), s, None, None)
            rows.append(row)
    return rows


def default_groups(field, labels=None):
    """"All", the altitude classes and (if given) clusters 1..k, as row-index groups."""
    groups = {"All": np.arange(field.n)}
    classes = altitude_class(field.elevs)
    for c in ALTITUDE_CLASSES:
        members = np.flatnonzero(classes == c)
        if members.size:
            groups[c] = members
    if labels is not None:
        labels = np.asarray(labels)
        for c in np.unique(labels):
            groups[f"cluster_{int(c)}"] = np.flatnonzero(labels == c)
    return groups


def write_coherence_csv(rows, path):
    write_csv(path, ["group", "n_locations", "statistic", "dof", "var_sai"], rows)
