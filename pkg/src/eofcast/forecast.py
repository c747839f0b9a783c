"""Wavelet-ANN hybrid forecaster.

A series is split into its Haar MODWT multiresolution components, one
small network is fitted to each component, each component is forecast
recursively and the component forecasts are summed.
"""
import json
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .ann import AnnModel, train_ann
from .errors import SeriesTooShort
from .io import read_f64, write_f64
from .wavelet import modwt_mra


@dataclass(frozen=True)
class ForecastConfig:
    levels: int = 10
    filter: str = "haar"
    lag: int = 30
    hidden_units: int = 40
    epochs: int = 200
    learning_rate: float = 0.01
    batch_size: int = 32
    seed: int = 0
    horizon: int = 365

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        if self.epochs < 1 or self.lag < 1 or self.hidden_units < 1:
            raise ValueError("epochs, lag and hidden_units must be >= 1")
        if self.filter != "haar":
            raise ValueError(f"unsupported wavelet filter {self.filter!r}")

    def component_seed(self, index, stream=0):
        # independent, order-free seeds per (series stream, component)
        return int(np.random.SeedSequence([self.seed, stream, index]).generate_state(1)[0])


@dataclass(frozen=True)
class WaveletAnnFit:
    config: ForecastConfig
    models: tuple            # one AnnModel per MRA component, details first
    components: np.ndarray   # (J+1) x N
    forecasts: np.ndarray    # (J+1) x h

    @property
    def forecast(self):
        return self.forecasts.sum(axis=0)


def fit_wavelet_ann(x, cfg=ForecastConfig(), stream=0):
    """Decompose ``x``, train one network per component and forecast each.

    ``stream`` separates the seeds of different series sharing one config
    (e.g. the EOF columns of a single model).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size <= cfg.lag:
        raise SeriesTooShort(f"series of length {x.size} is too short for lag {cfg.lag}")
    if x.size < 2 ** cfg.levels:
        warnings.warn(f"series length {x.size} < 2**{cfg.levels}; the top MODWT levels "
                      "are dominated by circular wrap-around", RuntimeWarning, stacklevel=2)

    components = modwt_mra(x, cfg.levels, cfg.filter).components
    models, forecasts = [], np.empty((components.shape[0], cfg.horizon))
    for j, comp in enumerate(components):
        model = train_ann(comp, lag=cfg.lag, hidden_units=cfg.hidden_units,
                          epochs=cfg.epochs, learning_rate=cfg.learning_rate,
                          batch_size=cfg.batch_size, seed=cfg.component_seed(j, stream))
        models.append(model)
        forecasts[j] = model.forecast(comp, cfg.horizon)
    return WaveletAnnFit(cfg, tuple(models), components, forecasts)


def forecast_series(x, cfg=ForecastConfig()):
    """Length-``cfg.horizon`` Wavelet-ANN forecast continuing ``x``."""
    return fit_wavelet_ann(x, cfg).forecast


def forecast_eofs(model, k, cfg=ForecastConfig(), return_fits=False):
    """Extend the first ``k`` temporal EOFs by ``cfg.horizon`` steps.

    Returns a (p + h) x k matrix whose first p rows are ``model.v[:, :k]``
    unchanged.
    """
    if not 1 <= k <= model.rank:
        raise ValueError(f"k must lie in [1, {model.rank}], got {k}")
    v = model.v[:, :k]
    fits = [fit_wavelet_ann(v[:, i], cfg, stream=i + 1) for i in range(k)]
    v_ext = np.vstack([v, np.column_stack([f.forecast for f in fits])
                       if cfg.horizon else np.empty((0, k))])
    return (v_ext, fits) if return_fits else v_ext


def save_fits(fits, directory):
    """Persist trained component networks: ``wann_meta.json`` + ``comp_<j>.f64le``.

    Each blob holds w_in, b_in, w_out, b_out flattened in that order; one
    blob per (series, component) with the series index prefixed when more
    than one series is saved.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    meta = {"config": asdict(fits[0].config), "series": []}
    for s, fit in enumerate(fits):
        entries = []
        for j, m in enumerate(fit.models):
            name = f"comp_{j}.f64le" if len(fits) == 1 else f"s{s}_comp_{j}.f64le"
            write_f64(directory / name, np.concatenate(
                [m.w_in.ravel(), m.b_in, m.w_out, [m.b_out]]))
            entries.append({"file": name, "component": "smooth" if j == fit.config.levels
                            else f"detail_{j + 1}", "seed": m.seed, "lo": m.lo, "hi": m.hi})
        meta["series"].append(entries)
    (directory / "wann_meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def load_models(directory):
    """Inverse of :func:`save_fits`: a list (per series) of lists of AnnModel."""
    directory = Path(directory)
    meta = json.loads((directory / "wann_meta.json").read_text())
    cfg = meta["config"]
    lag, hidden = cfg["lag"], cfg["hidden_units"]
    out = []
    for entries in meta["series"]:
        models = []
        for e in entries:
            flat = read_f64(directory / e["file"])
            a = lag * hidden
            models.append(AnnModel(lag, hidden, flat[:a].reshape(lag, hidden),
                                   flat[a:a + hidden], flat[a + hidden:a + 2 * hidden],
                                   float(flat[-1]), e["lo"], e["hi"], e["seed"]))
        out.append(models)
    return out
