"""Synthetic data generators used by the demos, tests and the bundled dataset."""
import numpy as np

from .grid import from_arrays


def daily_dates(start, end):
    return np.arange(np.datetime64(start, "D"), np.datetime64(end, "D") + 1)


def seasonal_series(n, seed, snr=5.0, annual_period=365.25, weekly_period=7.0,
                    weekly_amplitude=0.5):
    """Annual + weekly sinusoid plus Gaussian noise.

    ``snr`` is the ratio of signal variance to noise variance.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(n)
    signal = (np.sin(2 * np.pi * t / annual_period)
              + weekly_amplitude * np.sin(2 * np.pi * t / weekly_period))
    return signal + rng.normal(0.0, np.sqrt(signal.var() / snr), n)


def planted_mode_field(n_lon=20, n_lat=20, start="2018-01-01", end="2022-12-31",
                       seed=0, noise=0.05, lon0=-72.0, lat0=-30.0, step=0.25,
                       variable_name="precipitation"):
    """Gridded daily field built from three planted space-time modes.

    The modes are an annual cycle peaking in austral winter, a semiannual
    oscillation and a slowly modulated 45-day oscillation, each with its
    own smooth spatial pattern (north-south gradient, west-east gradient,
    central bump).  A location-dependent base level keeps values positive.
    """
    rng = np.random.default_rng(seed)
    dates = daily_dates(start, end)
    t = np.arange(dates.size)
    lon, lat = np.meshgrid(lon0 + step * np.arange(n_lon), lat0 - step * np.arange(n_lat))
    lon, lat = lon.ravel(), lat.ravel()
    y = (lat0 - lat) / max(step * (n_lat - 1), step)        # 0 north .. 1 south
    x = (lon - lon0) / max(step * (n_lon - 1), step)         # 0 west .. 1 east

    temporal = np.vstack([
        np.sin(2 * np.pi * (t - 80) / 365.25),
        np.sin(4 * np.pi * t / 365.25),
        np.sin(2 * np.pi * t / 45.0) * (1 + 0.3 * np.sin(2 * np.pi * t / 730.5)),
    ])
    spatial = np.vstack([
        0.5 + 2.5 * y,
        1.5 * (x - 0.5),
        1.2 * np.exp(-((x - 0.5) ** 2 + (y - 0.5) ** 2) / 0.08),
    ])
    base = 4.0 + 2.0 * y
    values = base[:, None] + spatial.T @ temporal
    values += rng.normal(0.0, noise, values.shape)
    values = np.clip(values, 0.0, None)
    elev = 200.0 + 1800.0 * x
    return from_arrays(lon, lat, values, dates, elev, variable_name)


def regime_series(n_per_regime, n_regimes, length, seed=0, noise=0.1):
    """Series drawn from well separated regimes, with their true labels.

    Regime r is a sinusoid of its own period and offset; members differ
    only by a small random phase jitter and additive noise.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(length)
    rows, labels = [], []
    for r in range(n_regimes):
        period = 8 + 6 * r
        level = 3.0 * r
        for _ in range(n_per_regime):
            phase = rng.uniform(-0.2, 0.2)
            rows.append(level + np.sin(2 * np.pi * t / period + phase)
                        + rng.normal(0, noise, length))
            labels.append(r + 1)
    return np.array(rows), np.array(labels)


DEMO_CONFIG = {
    "data": "synthetic.csv",
    "cluster_months": [5, 6, 7, 8],
    "k": 3,
    "dtw_band": 7,
    "train_window": ["2018-01-01", "2021-12-31"],
    "horizon": 365,
    "threshold": 0.8,
    "coherence_months": [5, 6, 7, 8],
    "seed": 42,
}


def write_demo(directory, seed=0):
    """Write the bundled synthetic dataset and a matching config.

    Produces ``synthetic.csv`` (20 x 20 grid, three planted modes,
    2018-2022 daily) and ``config.json`` in ``directory``.
    """
    import json
    from pathlib import Path

    from .grid import write_tidy_csv

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_tidy_csv(planted_mode_field(seed=seed), directory / "synthetic.csv")
    cfg = dict(DEMO_CONFIG, data=str((directory / "synthetic.csv").resolve()))
    (directory / "config.json").write_text(json.dumps(cfg, indent=2) + "\n")
    return directory / "config.json"
