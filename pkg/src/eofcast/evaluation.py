"""Forecast accuracy metrics, the persistence baseline and PC stability."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .eof import spatial_coefficients
from .errors import AllZeroActuals, LengthMismatch, ShapeMismatch, ZeroNaiveError
from .io import write_csv


@dataclass(frozen=True)
class AccuracyRow:
    label: str
    mae: float
    mape: Optional[float]     # percent; None when every actual is zero
    mase: Optional[float]     # None when the training series is constant
    smape: float              # percent
    rmse: float
    mape_excluded: int = 0    # zero actuals left out of MAPE

    def as_row(self):
        return [self.label, self.mae, self.mape, self.mase, self.smape, self.rmse]


ACCURACY_HEADER = ["label", "mae", "mape", "mase", "smape", "rmse"]


def naive_forecast(train, h):
    """Persistence: repeat the last training value ``h`` times."""
    train = np.asarray(train, dtype=float)
    if train.size == 0:
        raise ValueError("train must be non-empty")
    return np.full(int(h), train[-1])


def naive_scale(train):
    """In-sample MAE of the lag-1 naive forecast."""
    train = np.asarray(train, dtype=float)
    if train.size < 2:
        raise ValueError("MASE needs at least two training points")
    return float(np.abs(np.diff(train)).mean())


def mape(actual, forecast):
    actual, forecast = np.asarray(actual, float), np.asarray(forecast, float)
    keep = actual != 0
    if not keep.any():
        raise AllZeroActuals("MAPE is undefined when every actual value is zero")
    with np.errstate(over="ignore"):
        return float(100 * np.mean(np.abs((actual[keep] - forecast[keep]) / actual[keep])))


def smape(actual, forecast):
    actual, forecast = np.asarray(actual, float), np.asarray(forecast, float)
    num = 2 * np.abs(forecast - actual)
    den = np.abs(actual) + np.abs(forecast)
    ratio = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return float(100 * ratio.mean())


def mase(actual, forecast, train):
    scale = naive_scale(train)
    if scale == 0:
        raise ZeroNaiveError("training series is constant; MASE scale is zero")
    return float(np.mean(np.abs(np.asarray(actual, float) - np.asarray(forecast, float))) / scale)


def forecast_metrics(actual, forecast, train, label=""):
    """MAE, MAPE, MASE, SMAPE and RMSE of ``forecast`` against ``actual``.

    Undefined metrics (all-zero actuals for MAPE, constant ``train`` for
    MASE) are reported as ``None``.
    """
    actual = np.asarray(actual, dtype=float)
    forecast = np.asarray(forecast, dtype=float)
    if actual.shape != forecast.shape or actual.ndim != 1 or actual.size == 0:
        raise LengthMismatch(f"actual {actual.shape} and forecast {forecast.shape} "
                             "must be equal-length non-empty series")
    err = forecast - actual
    try:
        mape_value = mape(actual, forecast)
    except AllZeroActuals:
        mape_value = None
    try:
        mase_value = mase(actual, forecast, train)
    except ZeroNaiveError:
        mase_value = None
    return AccuracyRow(label, float(np.abs(err).mean()), mape_value, mase_value,
                       smape(actual, forecast), float(np.sqrt(np.mean(err ** 2))),
                       int(np.sum(actual == 0)))


def alpha_stability(model_a, model_b, k):
    """Absolute cosine similarity of the first ``k`` PCs of two EOF models."""
    if model_a.n_locations != model_b.n_locations:
        raise ShapeMismatch("models cover different numbers of locations")
    if k > min(model_a.rank, model_b.rank):
        raise ShapeMismatch(f"k = {k} exceeds the rank of one of the models")
    a = spatial_coefficients(model_a, k).alpha
    b = spatial_coefficients(model_b, k).alpha
    num = np.abs(np.sum(a * b, axis=0))
    den = np.linalg.norm(a, axis=0) * np.linalg.norm(b, axis=0)
    sim = np.divide(num, den, out=np.zeros(k), where=den > 0)
    return np.clip(sim, 0.0, 1.0)


def write_accuracy_csv(rows, path):
    write_csv(path, ACCURACY_HEADER, [r.as_row() for r in rows])
