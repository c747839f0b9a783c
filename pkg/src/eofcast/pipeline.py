"""End-to-end experiment: cluster, decompose, forecast, reconstruct, evaluate.

Every stage reads the artifacts of the stages before it from the output
directory and writes its own, so a run can be resumed stage by stage:

    ingest     field/meta.json, field/values.f64le
    cluster    clusters.json, dtw.f64le, grid_labels.json
    coherence  coherence.csv
    decompose  cluster_<c>/eof/, cluster_<c>/decomposition.json
    forecast   cluster_<c>/wann/, cluster_<c>/v_ext.f64le, cluster_<c>/reconstruction.f64le
    evaluate   accuracy.csv, fig_medoid_<c>.csv, report.json

Wall-clock timings go to ``timings.json``; every other artifact is a
deterministic function of the configuration and the data.
"""
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import coherence as coh
from .clustering import assign_grid, cluster_hierarchical, haversine
from .config import PipelineConfig
from .dtw import DistanceMatrix, dtw_matrix
from .eof import (decompose, load_model, reconstruct, reconstruct_extended,
                  save_model, truncate_rank)
from .errors import ConfigError, DataError
from .evaluation import (AccuracyRow, alpha_stability, forecast_metrics,
                         naive_forecast, write_accuracy_csv)
from .forecast import forecast_eofs, save_fits
from .grid import ingest_tidy_csv, load_field, save_field, subset
from .io import read_f64, write_csv, write_f64, write_json

log = logging.getLogger(__name__)

STAGES = ("ingest", "cluster", "coherence", "decompose", "forecast", "evaluate")


@dataclass
class ClusterResult:
    cluster: int
    n_grid_points: int
    k_used: int
    explained_variance: float
    medoid: dict
    accuracy: AccuracyRow
    naive_accuracy: AccuracyRow
    alpha_stability: list
    seconds: float
    forecast: np.ndarray
    actual: np.ndarray


@dataclass
class ForecastReport:
    clusters: list
    coherence: list
    out: Path

    @property
    def accuracy_rows(self):
        return [c.accuracy for c in self.clusters]


def _out(cfg):
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cluster_dir(out, c):
    return out / f"cluster_{c}"


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise DataError(f"{path} missing; run the upstream stage first") from None


def _field(out):
    if not (out / "field" / "meta.json").exists():
        raise DataError(f"{out / 'field'} missing; run the ingest stage first")
    return load_field(out / "field")


def _train_test(cfg, field):
    start, end = (np.datetime64(w, "D") for w in cfg.train_window)
    dates = field.time.dates
    if start < dates[0] or end > dates[-1]:
        raise ConfigError(f"train_window {cfg.train_window[0]}..{cfg.train_window[1]} is "
                          f"outside the data range {dates[0]}..{dates[-1]}")
    train = subset(field, (start, end))
    future = end + np.arange(1, cfg.horizon + 1)
    held = np.flatnonzero(np.isin(dates, future))
    return train, future, held


# -- stages -----------------------------------------------------------------

def stage_ingest(cfg):
    out = _out(cfg)
    src = Path(cfg.data)
    if src.is_dir():
        field = load_field(src)
    elif src.exists():
        field = ingest_tidy_csv(src, cfg.variable_name)
    else:
        raise DataError(f"data source {src} does not exist")
    save_field(field, out / "field")
    log.info("ingested %d locations x %d dates", field.n, field.p)
    return field


def _sample_index(cfg, field):
    if cfg.samples is None:
        return np.arange(field.n)
    lons, lats = field.lons, field.lats
    index = []
    for lon, lat in cfg.samples:
        i = int(np.argmin(haversine(lon, lat, lons, lats)))
        if i not in index:
            index.append(i)
    return np.array(index)


def stage_cluster(cfg):
    out = _out(cfg)
    field = _field(out)
    if cfg.k > field.n:
        raise ConfigError(f"k = {cfg.k} exceeds the number of locations {field.n}")
    samples = _sample_index(cfg, field)
    if cfg.k > samples.size:
        raise ConfigError(f"k = {cfg.k} exceeds the number of sample locations {samples.size}")
    window = subset(field, cfg.cluster_window, cfg.cluster_months)
    dist = dtw_matrix(window.values[samples], cfg.dtw_band, cfg.normalize,
                      series_ids=[field.locations[i].id for i in samples])
    model = cluster_hierarchical(dist, cfg.k)
    grid_labels = assign_grid(field.locations, [field.locations[i] for i in samples],
                              model.labels)
    write_json(out / "clusters.json", model.as_dict())
    write_f64(out / "dtw.f64le", dist.d)
    write_json(out / "grid_labels.json", {"sample_index": samples.tolist(),
                                          "labels": grid_labels.tolist()})
    return model, grid_labels, samples


def _load_clusters(out):
    meta = _read_json(out / "clusters.json")
    grid = _read_json(out / "grid_labels.json")
    m = len(meta["series_ids"])
    dist = DistanceMatrix(read_f64(out / "dtw.f64le", (m, m)), meta["series_ids"])
    return meta, dist, np.array(grid["sample_index"]), np.array(grid["labels"])


def stage_coherence(cfg):
    out = _out(cfg)
    field = _field(out)
    meta, _, samples, _ = _load_clusters(out)
    sample_field = field.select_locations(samples)
    if cfg.cluster_window is not None:
        sample_field = subset(sample_field, cfg.cluster_window)
    groups = coh.default_groups(sample_field, meta["labels"])
    rows = coh.coherence_table(sample_field, groups,
                               months=cfg.coherence_months or range(1, 13),
                               wet_threshold=cfg.wet_threshold)
    coh.write_coherence_csv(rows, out / "coherence.csv")
    return rows


def stage_decompose(cfg):
    out = _out(cfg)
    field = _field(out)
    _, _, _, grid_labels = _load_clusters(out)
    train, _, _ = _train_test(cfg, field)
    results = {}
    for c in np.unique(grid_labels):
        c = int(c)
        rows = np.flatnonzero(grid_labels == c)
        t0 = time.perf_counter()
        model = decompose(train.values[rows])
        k_used = truncate_rank(model, cfg.threshold)
        d = _cluster_dir(out, c)
        save_model(model, d / "eof")
        write_json(d / "decomposition.json", {
            "cluster": c, "grid_rows": rows.tolist(),
            "location_ids": [field.locations[i].id for i in rows],
            "k_used": k_used, "explained_variance": model.explained_variance(k_used)})
        results[c] = (model, k_used, time.perf_counter() - t0)
    return results


def _forecast_cluster(args):
    directory, k_used, fcfg = args
    t0 = time.perf_counter()
    model = load_model(Path(directory) / "eof")
    v_ext, fits = forecast_eofs(model, k_used, fcfg, return_fits=True)
    recon = reconstruct_extended(model, k_used, v_ext, fcfg.horizon)
    return v_ext, fits, recon, time.perf_counter() - t0


def _cluster_seed(seed, c):
    return int(np.random.SeedSequence([seed, c]).generate_state(1)[0])


def stage_forecast(cfg):
    out = _out(cfg)
    _, _, _, grid_labels = _load_clusters(out)
    clusters = [int(c) for c in np.unique(grid_labels)]
    base = cfg.forecast_config()
    tasks = []
    for c in clusters:
        d = _cluster_dir(out, c)
        k_used = _read_json(d / "decomposition.json")["k_used"]
        tasks.append((str(d), k_used, replace(base, seed=_cluster_seed(cfg.seed, c))))
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_forecast_cluster, tasks))
    else:
        results = [_forecast_cluster(t) for t in tasks]
    # writes are serialised here, in cluster order
    seconds = {}
    for c, (v_ext, fits, recon, secs) in zip(clusters, results):
        d = _cluster_dir(out, c)
        save_fits(fits, d / "wann")
        write_f64(d / "v_ext.f64le", v_ext)
        write_f64(d / "reconstruction.f64le", recon)
        write_json(d / "forecast.json", {"rows": recon.shape[0], "columns": recon.shape[1],
                                         "v_ext_shape": list(v_ext.shape)})
        seconds[c] = secs
        log.info("cluster %d: forecast %d EOFs in %.1fs", c, v_ext.shape[1], secs)
    return seconds


def stage_evaluate(cfg, seconds=None):
    out = _out(cfg)
    field = _field(out)
    meta, dist, samples, grid_labels = _load_clusters(out)
    train, future, held = _train_test(cfg, field)
    p, h = train.p, cfg.horizon
    medoid_series = meta["medoid_ids"]
    seconds = seconds or {}

    results, rows = [], []
    for c in [int(c) for c in np.unique(grid_labels)]:
        d = _cluster_dir(out, c)
        dec = _read_json(d / "decomposition.json")
        grid_rows = np.array(dec["grid_rows"])
        shape = _read_json(d / "forecast.json")
        recon = read_f64(d / "reconstruction.f64le", (shape["rows"], shape["columns"]))

        # medoid of the sample clustering, or the cluster row nearest to it
        # when the medoid itself was assigned elsewhere
        med_grid = int(samples[medoid_series[c - 1]]) if c <= len(medoid_series) else grid_rows[0]
        if med_grid not in grid_rows:
            med_grid = int(grid_rows[np.argmin(haversine(
                field.locations[med_grid].lon, field.locations[med_grid].lat,
                field.lons[grid_rows], field.lats[grid_rows]))])
        r = int(np.flatnonzero(grid_rows == med_grid)[0])
        loc = field.locations[med_grid]
        train_series = train.values[med_grid]
        forecast = recon[r, p:p + h]
        actual = field.values[med_grid, held]
        fc = forecast[:held.size]

        if held.size:
            acc = forecast_metrics(actual, fc, train_series, f"cluster_{c}")
            naive = forecast_metrics(actual, naive_forecast(train_series, held.size),
                                     train_series, f"cluster_{c}_naive")
        else:
            nan = float("nan")
            acc = AccuracyRow(f"cluster_{c}", nan, None, None, nan, nan)
            naive = AccuracyRow(f"cluster_{c}_naive", nan, None, None, nan, nan)

        model = load_model(d / "eof")
        stability = []
        if held.size:
            extended = field.values[np.ix_(grid_rows, np.concatenate(
                [np.flatnonzero(np.isin(field.time.dates, train.time.dates)), held]))]
            other = decompose(extended)
            k = min(dec["k_used"], model.rank, other.rank)
            stability = alpha_stability(model, other, k).tolist()

        in_sample = reconstruct(model, dec["k_used"])
        if not np.array_equal(recon[:, :p], in_sample):
            raise DataError(f"cluster {c}: reconstruction history differs from the "
                            "truncated in-sample reconstruction")

        write_csv(out / f"fig_medoid_{c}.csv", ["date", "actual", "forecast"],
                  [[str(dt), float(actual[i]) if i < held.size else None, float(forecast[i])]
                   for i, dt in enumerate(future)])
        rows += [acc, naive]
        results.append(ClusterResult(
            c, int(grid_rows.size), dec["k_used"], dec["explained_variance"],
            {"location_id": loc.id, "lon": loc.lon, "lat": loc.lat, "elev": loc.elev},
            acc, naive, stability, float(seconds.get(c, float("nan"))), forecast, actual))

    write_accuracy_csv(rows, out / "accuracy.csv")
    coherence_rows = []
    if (out / "coherence.csv").exists():
        import csv
        with open(out / "coherence.csv") as fh:
            coherence_rows = list(csv.DictReader(fh))
    report = ForecastReport(results, coherence_rows, out)
    write_json(out / "report.json", _report_dict(cfg, report))
    return report


def _accuracy_dict(row):
    return {"label": row.label, "mae": row.mae, "mape": row.mape, "mase": row.mase,
            "smape": row.smape, "rmse": row.rmse, "mape_excluded": row.mape_excluded}


def _report_dict(cfg, report):
    # the output directory is left out so copies of a run compare equal
    config = {k: v for k, v in cfg.to_json().items() if k not in ("out", "jobs")}
    return {
        "config": config,
        "clusters": [{
            "cluster": r.cluster, "n_grid_points": r.n_grid_points, "k_used": r.k_used,
            "explained_variance": r.explained_variance, "medoid": r.medoid,
            "accuracy": _accuracy_dict(r.accuracy),
            "naive_accuracy": _accuracy_dict(r.naive_accuracy),
            "alpha_stability": r.alpha_stability,
            "figure": f"fig_medoid_{r.cluster}.csv",
            "directory": f"cluster_{r.cluster}",
        } for r in report.clusters],
        "coherence": report.coherence,
        "files": ["accuracy.csv", "coherence.csv", "clusters.json", "dtw.f64le",
                  "grid_labels.json", "timings.json"],
    }


def run_pipeline(cfg: PipelineConfig) -> ForecastReport:
    """Run every stage in order; returns the in-memory report."""
    out = _out(cfg)
    t0 = time.perf_counter()
    stage_ingest(cfg)
    stage_cluster(cfg)
    stage_coherence(cfg)
    decomposed = stage_decompose(cfg)
    seconds = stage_forecast(cfg)
    total = {c: seconds[c] + decomposed[c][2] for c in seconds}
    report = stage_evaluate(cfg, total)
    (out / "timings.json").write_text(json.dumps({
        "total_seconds": time.perf_counter() - t0,
        "cluster_seconds": {str(c): s for c, s in total.items()}}, indent=2) + "\n")
    return report


def run_stage(name, cfg):
    if name not in STAGES:
        raise ValueError(f"unknown stage {name!r}")
    return globals()[f"stage_{name}"](cfg)
