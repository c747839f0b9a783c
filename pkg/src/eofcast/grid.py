"""Gridded spatiotemporal fields: data model, tidy-CSV ingestion, subsetting.

A field is an n x p matrix of one variable, rows = locations, columns =
daily time steps.  Locations are kept in a canonical order, north to
south then west to east, so indices are reproducible across runs.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (DataError, DuplicateCell, EmptySelection, MalformedRow,
                     MissingCell, NegativePrecipitation, NonFiniteValue,
                     ShapeMismatch)
from .io import read_f64, write_f64

HEADER = ["lon", "lat", "elev", "date", "value"]


@dataclass(frozen=True)
class Location:
    id: int
    lon: float
    lat: float
    elev: float = 0.0

    def __post_init__(self):
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude {self.lon} outside [-180, 180]")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        if not math.isfinite(self.elev):
            raise ValueError("elevation must be finite")


@dataclass(frozen=True, eq=False)
class TimeAxis:
    dates: np.ndarray   # datetime64[D], strictly increasing

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        if dates.ndim != 1 or dates.size < 1:
            raise ValueError("a time axis needs at least one date")
        if dates.size > 1 and np.any(np.diff(dates) <= np.timedelta64(0, "D")):
            raise ValueError("dates must be strictly increasing")
        dates.setflags(write=False)
        object.__setattr__(self, "dates", dates)

    def __len__(self):
        return self.dates.size

    def __eq__(self, other):
        return isinstance(other, TimeAxis) and np.array_equal(self.dates, other.dates)

    @property
    def months(self):
        return self.dates.astype("datetime64[M]").astype(int) % 12 + 1

    @property
    def years(self):
        return self.dates.astype("datetime64[Y]").astype(int) + 1970

    def iso(self):
        return [str(d) for d in self.dates]


@dataclass(frozen=True, eq=False)
class SpatioTemporalField:
    locations: tuple
    time: TimeAxis
    values: np.ndarray
    variable_name: str = "precipitation"

    def __post_init__(self):
        locations = tuple(self.locations)
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (len(locations), len(self.time)):
            raise ShapeMismatch(f"values shape {values.shape} does not match "
                                f"{len(locations)} locations x {len(self.time)} dates")
        if len({loc.id for loc in locations}) != len(locations):
            raise DataError("location ids must be unique")
        if not np.all(np.isfinite(values)):
            i, j = np.argwhere(~np.isfinite(values))[0]
            raise NonFiniteValue(f"non-finite value at location {locations[i].id}, "
                                 f"date {self.time.dates[j]}")
        values.setflags(write=False)
        object.__setattr__(self, "locations", locations)
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return len(self.locations)

    @property
    def p(self):
        return len(self.time)

    @property
    def lons(self):
        return np.array([loc.lon for loc in self.locations])

    @property
    def lats(self):
        return np.array([loc.lat for loc in self.locations])

    @property
    def elevs(self):
        return np.array([loc.elev for loc in self.locations])

    def equals(self, other):
        return (self.locations == other.locations and self.time == other.time
                and self.variable_name == other.variable_name
                and np.array_equal(self.values, other.values))

    def select_locations(self, index):
        index = np.asarray(index, dtype=int)
        return SpatioTemporalField(tuple(self.locations[i] for i in index), self.time,
                                   self.values[index], self.variable_name)


def canonical_order(lons, lats):
    """Index sorting locations by latitude descending, then longitude ascending."""
    return np.lexsort((np.asarray(lons), -np.asarray(lats)))


def from_arrays(lons, lats, values, dates, elevs=None, variable_name="precipitation"):
    """Build a field from coordinate arrays, reordering rows canonically."""
    lons = np.asarray(lons, dtype=float)
    lats = np.asarray(lats, dtype=float)
    elevs = np.zeros_like(lons) if elevs is None else np.asarray(elevs, dtype=float)
    values = np.asarray(values, dtype=float)
    order = canonical_order(lons, lats)
    locations = tuple(Location(i, float(lons[k]), float(lats[k]), float(elevs[k]))
                      for i, k in enumerate(order))
    return SpatioTemporalField(locations, TimeAxis(dates), values[order], variable_name)


def _parse_row(row, lineno):
    if len(row) != 5:
        raise MalformedRow(f"line {lineno}: expected 5 fields, got {len(row)}: {row!r}")
    try:
        lon, lat, elev = float(row[0]), float(row[1]), float(row[2])
        date = np.datetime64(row[3].strip(), "D")
        value = float(row[4])
    except ValueError as exc:
        raise MalformedRow(f"line {lineno}: {exc}: {row!r}") from None
    if len(row[3].strip()) != 10:
        raise MalformedRow(f"line {lineno}: date {row[3]!r} is not YYYY-MM-DD")
    if not (-180 <= lon <= 180 and -90 <= lat <= 90) or not math.isfinite(elev):
        raise MalformedRow(f"line {lineno}: coordinates out of range: {row!r}")
    return lon, lat, elev, date, value


def ingest_tidy_csv(path, variable_name="precipitation"):
    """Read a long-format ``lon,lat,elev,date,value`` CSV into a complete field.

    Every (location, date) pair must appear exactly once; the first
    offending record is reported otherwise.
    """
    cells = {}
    elev_of = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != HEADER:
            raise MalformedRow(f"line 1: header must be {','.join(HEADER)}, got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            lon, lat, elev, date, value = _parse_row(row, lineno)
            if not math.isfinite(value):
                raise NonFiniteValue(f"line {lineno}: non-finite value {row[4]!r}")
            if variable_name == "precipitation" and value < 0:
                raise NegativePrecipitation(f"line {lineno}: negative precipitation {value}")
            key = (lon, lat)
            if elev_of.setdefault(key, elev) != elev:
                raise MalformedRow(f"line {lineno}: elevation of ({lon}, {lat}) changes "
                                   f"from {elev_of[key]} to {elev}")
            if (key, date) in cells:
                raise DuplicateCell(f"line {lineno}: duplicate record for "
                                    f"({lon}, {lat}) on {date}")
            cells[(key, date)] = value
    if not cells:
        raise EmptySelection(f"{path}: no data rows")

    coords = list(elev_of)
    lons = np.array([c[0] for c in coords])
    lats = np.array([c[1] for c in coords])
    order = canonical_order(lons, lats)
    dates = np.array(sorted({d for (_, d) in cells}), dtype="datetime64[D]")

    row_of = np.empty(len(coords), dtype=int)
    row_of[order] = np.arange(len(coords))
    coord_index = {c: row_of[k] for k, c in enumerate(coords)}
    date_index = {d: j for j, d in enumerate(dates)}
    values = np.zeros((len(coords), dates.size))
    present = np.zeros(values.shape, dtype=bool)
    for (key, d), v in cells.items():
        i, j = coord_index[key], date_index[d]
        values[i, j] = v
        present[i, j] = True
    if not present.all():
        i, j = np.argwhere(~present)[0]
        key = coords[order[i]]
        raise MissingCell(f"no record for location (lon={key[0]}, lat={key[1]}) on {dates[j]}")
    locations = tuple(Location(i, coords[k][0], coords[k][1], elev_of[coords[k]])
                      for i, k in enumerate(order))
    return SpatioTemporalField(locations, TimeAxis(dates), values, variable_name)


def write_tidy_csv(field, path):
    """Emit ``field`` in the long CSV layout; floats are written round-trip exact."""
    dates = field.time.iso()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for loc, row in zip(field.locations, field.values):
            head = [repr(loc.lon), repr(loc.lat), repr(loc.elev)]
            for d, v in zip(dates, row):
                writer.writerow(head + [d, repr(float(v))])


def subset(field, window=None, months=None):
    """Keep the dates inside ``window`` (inclusive pair) whose month is in ``months``."""
    dates = field.time.dates
    keep = np.ones(dates.size, dtype=bool)
    if window is not None:
        start, end = (np.datetime64(w, "D") for w in window)
        if start > end:
            raise ValueError(f"window start {start} is after end {end}")
        if end < dates[0] or start > dates[-1]:
            raise DataError(f"window {start}..{end} does not overlap the time axis "
                            f"{dates[0]}..{dates[-1]}")
        keep &= (dates >= start) & (dates <= end)
    if months is not None:
        months = set(int(m) for m in months)
        if not months or not months <= set(range(1, 13)):
            raise ValueError(f"months must be a non-empty subset of 1..12, got {sorted(months)}")
        keep &= np.isin(field.time.months, sorted(months))
    if not keep.any():
        raise EmptySelection("no dates survive the window/month selection")
    return SpatioTemporalField(field.locations, TimeAxis(dates[keep]),
                               field.values[:, keep], field.variable_name)


def save_field(field, directory):
    """Persist as ``meta.json`` + row-major little-endian ``values.f64le``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    meta = {
        "n": field.n, "p": field.p, "variable_name": field.variable_name,
        "locations": [{"id": l.id, "lon": l.lon, "lat": l.lat, "elev": l.elev}
                      for l in field.locations],
        "dates": field.time.iso(),
    }
    (directory / "meta.json").write_text(json.dumps(meta) + "\n")
    write_f64(directory / "values.f64le", field.values)


def load_field(directory):
    directory = Path(directory)
    meta = json.loads((directory / "meta.json").read_text())
    locations = tuple(Location(l["id"], l["lon"], l["lat"], l["elev"])
                      for l in meta["locations"])
    values = read_f64(directory / "values.f64le", (meta["n"], meta["p"]))
    return SpatioTemporalField(locations, TimeAxis(np.array(meta["dates"], dtype="datetime64[D]")),
                               values, meta["variable_name"])
