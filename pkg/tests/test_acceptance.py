"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py``; the lines are printed in the
terminal summary.  ``python tests/test_acceptance.py`` prints them directly.
"""
import itertools
import json
import time

import numpy as np
import pytest

from eofcast.clustering import cluster_hierarchical
from eofcast.coherence import AnnualSeriesMatrix, dof, var_sai
from eofcast.config import load_config
from eofcast.dtw import dtw_distance, dtw_matrix
from eofcast.eof import decompose, reconstruct, spatial_coefficients
from eofcast.evaluation import alpha_stability, forecast_metrics, naive_forecast
from eofcast.forecast import ForecastConfig, forecast_series
from eofcast.grid import subset
from eofcast.pipeline import run_pipeline
from eofcast.synthetic import planted_mode_field, regime_series, seasonal_series, write_demo
from eofcast.wavelet import modwt, modwt_mra

from conftest import ACCEPTANCE
from oracles import brute_force_ari, brute_force_dtw


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}"
    ACCEPTANCE[number] = line
    print(line)
    assert ok, line


def rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


def random_fields(count, seed, max_n=200, max_p=500):
    rng = np.random.default_rng(seed)
    yield rng.normal(size=(max_n, max_p))
    for _ in range(count - 1):
        n, p = rng.integers(2, max_n + 1), rng.integers(2, max_p + 1)
        yield rng.normal(rng.normal(), rng.uniform(0.1, 10), size=(n, p))


def test_01_eof_round_trip():
    t0 = time.perf_counter()
    worst = 0.0
    for x in random_fields(50, 1):
        m = decompose(x)
        eye = np.eye(m.rank)
        worst = max(worst, rel(reconstruct(m, m.rank), x),
                    np.abs(m.v.T @ m.v - eye).max(), np.abs(m.u.T @ m.u - eye).max())
    seconds = time.perf_counter() - t0
    record(1, "EOF round-trip", worst < 1e-9 and seconds < 30,
           f"worst error {worst:.2e} (tol 1e-9), {seconds:.1f}s (limit 30s)")


def test_02_pc_properties():
    worst_mean = worst_offdiag = 0.0
    ordered = True
    for x in random_fields(50, 2):
        m = decompose(x)
        alpha = spatial_coefficients(m, m.rank).alpha
        scale = np.abs(alpha).max()
        worst_mean = max(worst_mean, np.abs(alpha.mean(axis=0)).max() / scale)
        gram = alpha.T @ alpha
        off = gram - np.diag(np.diag(gram))
        worst_offdiag = max(worst_offdiag, np.abs(off).max() / np.abs(gram).max())
        var = alpha.var(axis=0)
        ordered &= bool(np.all(np.diff(var) <= 1e-12 * var[0]))
    ok = worst_mean < 1e-9 and worst_offdiag < 1e-9 and ordered
    record(2, "PC properties", ok,
           f"max |mean| {worst_mean:.2e}, max off-diagonal {worst_offdiag:.2e} (tol 1e-9), "
           f"variances nonincreasing: {ordered}")


def test_03_truncation_monotone():
    bad = 0
    for x in random_fields(20, 3, max_n=60, max_p=120):
        m = decompose(x)
        errors = [np.linalg.norm(reconstruct(m, k) - x) for k in range(m.rank + 1)]
        bad += int(np.any(np.diff(errors) > 1e-9 * errors[0]))
    record(3, "truncation monotonicity", bad == 0, f"{bad}/20 fields with an error increase")


def test_04_dtw_oracle():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(200):
        a = rng.normal(size=rng.integers(1, 7))
        b = rng.normal(size=rng.integers(1, 7))
        worst = max(worst, abs(dtw_distance(a, b) - brute_force_dtw(a, b)))
    asym = self_dist = 0.0
    for _ in range(1000):
        a = rng.normal(size=rng.integers(1, 40))
        b = rng.normal(size=rng.integers(1, 40))
        asym = max(asym, abs(dtw_distance(a, b) - dtw_distance(b, a)))
        self_dist = max(self_dist, dtw_distance(a, a))
    ok = worst <= 1e-12 and asym == 0.0 and self_dist == 0.0
    record(4, "DTW oracle", ok, f"max |dtw - enumeration| {worst:.1e} on 200 pairs (tol 1e-12), "
                                f"max asymmetry {asym:.1e}, max self-distance {self_dist:.1e}")


def test_05_clustering_recovery():
    scores = []
    for k in (2, 5):
        x, truth = regime_series(12, k, 60, seed=k)
        labels = cluster_hierarchical(dtw_matrix(x), k).labels
        scores.append(brute_force_ari(labels, truth))
        perm = np.random.default_rng(k).permutation(len(x))
        permuted = cluster_hierarchical(dtw_matrix(x[perm]), k).labels
        back = np.empty_like(permuted)
        back[perm] = permuted
        scores.append(brute_force_ari(back, labels))
    ok = all(s == pytest.approx(1.0, abs=1e-12) for s in scores)
    record(5, "clustering recovery", ok,
           "ARI k=2 {:.3f}, perm {:.3f}; k=5 {:.3f}, perm {:.3f} (need 1.0)".format(*scores))


def annual(values):
    values = np.asarray(values, float)
    return AnnualSeriesMatrix(values, tuple(range(values.shape[0])), "RAm",
                              tuple(range(values.shape[1])))


def test_06_coherence_limits():
    rng = np.random.default_rng(6)
    col = rng.normal(size=40)
    dup = var_sai(annual(np.tile(col[:, None], 8)))
    noise = var_sai(annual(rng.normal(size=(200, 20))))
    rank1 = dof(annual(np.outer(col, rng.uniform(0.5, 2, 6)) + rng.normal(size=6)))
    hadamard = np.array([[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]], float)
    ident = dof(annual(hadamard[:, 1:]))       # centred orthogonal columns: R = I
    in_bounds = 0
    for _ in range(100):
        m = int(rng.integers(2, 12))
        d = dof(annual(rng.normal(size=(int(rng.integers(3, 40)), m))))
        in_bounds += int(1 - 1e-12 <= d <= m + 1e-12)
    ok = (abs(dup - 1) <= 1e-12 and abs(noise - 1 / 20) <= 0.03 and abs(rank1 - 1) <= 1e-12
          and abs(ident - 3) <= 1e-12 and in_bounds == 100)
    record(6, "coherence limits", ok,
           f"var(SAI) duplicated {dup:.12f}, independent {noise:.4f} (1/20 +- 0.03); "
           f"DOF rank-1 {rank1:.12f}, identity {ident:.12f} (m=3); bounds {in_bounds}/100")


def test_07_modwt():
    rng = np.random.default_rng(7)
    worst = 0.0
    for n, j in itertools.product((2, 7, 100, 1461), (1, 3, 10)):
        x = rng.normal(size=n)
        mra = modwt_mra(x, j)
        c = modwt(x, j)
        energy = np.sum(c.wavelet ** 2) + np.sum(c.scaling ** 2)
        worst = max(worst, rel(mra.reconstruct(), x), abs(energy - x @ x) / (x @ x))
    hand = modwt(np.array([1.0, 3.0]), 1)
    exact = (np.array_equal(hand.wavelet[0], [-1.0, 1.0])
             and np.array_equal(hand.scaling, [2.0, 2.0]))
    record(7, "MODWT", worst < 1e-10 and exact,
           f"worst additivity/energy error {worst:.1e} (tol 1e-10), [1,3] case exact: {exact}")


@pytest.mark.slow
def test_08_forecaster_skill():
    t0 = time.perf_counter()
    details, ok = [], True
    for seed in (1, 2, 3):
        x = seasonal_series(4 * 365 + 1 + 365, seed=seed, snr=5.0)
        train, test = x[:1461], x[1461:]
        pred = forecast_series(train, ForecastConfig(horizon=365, seed=seed))
        model = forecast_metrics(test, pred, train)
        naive = forecast_metrics(test, naive_forecast(train, 365), train)
        gain = 1 - model.rmse / naive.rmse
        ok &= model.mase < 1.0 and gain >= 0.2
        details.append(f"seed {seed}: MASE {model.mase:.3f}, RMSE gain {100 * gain:.0f}%")
    seconds = time.perf_counter() - t0
    record(8, "forecaster skill", ok and seconds < 300,
           "; ".join(details) + f" (need MASE < 1, gain >= 20%); {seconds:.0f}s (limit 300s)")


def test_09_alpha_stability():
    field = planted_mode_field(noise=0.3, seed=9)
    four = decompose(subset(field, ("2018-01-01", "2021-12-31")).values)
    five = decompose(subset(field, ("2018-01-01", "2022-12-31")).values)
    sim = alpha_stability(four, five, 3)
    record(9, "alpha stability", bool(np.all(sim > 0.95)),
           "top-3 similarity " + ", ".join(f"{s:.4f}" for s in sim) + " (need > 0.95)")


def test_10_metric_fixed_points():
    rng = np.random.default_rng(10)
    train = rng.normal(size=100)
    fixed = forecast_metrics(train[1:], train[:-1], train).mase
    row = forecast_metrics([1.0, 2.0], [2.0, 4.0], [0.0, 1.0, 2.0])
    expected = dict(mae=1.5, rmse=np.sqrt(2.5), mase=1.5, smape=200 / 3, mape=100.0)
    hand = max(abs(getattr(row, k) - v) for k, v in expected.items())
    violations = 0
    for _ in range(1000):
        n = int(rng.integers(1, 50))
        r = forecast_metrics(rng.normal(size=n) * 10, rng.normal(size=n) * 10, train)
        violations += int(r.mae > r.rmse * (1 + 1e-12))
    ok = fixed == 1.0 and hand <= 1e-9 and violations == 0
    record(10, "metric fixed points", ok,
           f"in-sample naive MASE {fixed!r}; hand example max error {hand:.1e} (tol 1e-9); "
           f"MAE > RMSE in {violations}/1000 pairs")


def snapshot(out):
    return {p.relative_to(out).as_posix(): p.read_bytes()
            for p in sorted(out.rglob("*")) if p.is_file() and p.name != "timings.json"}


@pytest.mark.slow
def test_11_pipeline_determinism(tmp_path):
    cfg_path = write_demo(tmp_path / "demo")
    seconds = []
    for name in ("a", "b"):
        t0 = time.perf_counter()
        report = run_pipeline(load_config(cfg_path, {"out": str(tmp_path / name)}))
        seconds.append(time.perf_counter() - t0)
    identical = snapshot(tmp_path / "a") == snapshot(tmp_path / "b")
    explained = [c["explained_variance"] for c in
                 json.loads((tmp_path / "a" / "report.json").read_text())["clusters"]]
    ok = identical and min(explained) >= 0.8 and max(seconds) < 600
    record(11, "pipeline determinism", ok,
           f"byte-identical: {identical}; K explained variance "
           + ", ".join(f"{e:.3f}" for e in explained)
           + f" (need >= 0.8); {max(seconds):.0f}s per run (limit 600s); "
           f"{len(report.clusters)} clusters")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
