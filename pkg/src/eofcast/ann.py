"""Single-hidden-layer feedforward network for one-step-ahead prediction.

Written directly in numpy so that training is bit-for-bit reproducible
for a given seed: tanh hidden layer, linear output, squared-error loss,
mini-batch stochastic gradient descent.
"""
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteLoss, SeriesTooShort


@dataclass(frozen=True)
class AnnModel:
    lag: int
    hidden_units: int
    w_in: np.ndarray      # lag x hidden
    b_in: np.ndarray      # hidden
    w_out: np.ndarray     # hidden
    b_out: float
    lo: float             # min-max scaling bounds of the training series
    hi: float
    seed: int

    def _scale(self, x):
        half = 0.5 * (self.hi - self.lo)
        if half == 0.0:
            return np.zeros_like(x)
        return (x - 0.5 * (self.hi + self.lo)) / half

    def _unscale(self, z):
        return 0.5 * (self.hi + self.lo) + z * 0.5 * (self.hi - self.lo)

    def _forward_scaled(self, windows):
        return np.tanh(windows @ self.w_in + self.b_in) @ self.w_out + self.b_out

    def predict_next(self, windows):
        """One-step predictions for each row of ``windows`` (original units)."""
        windows = np.atleast_2d(np.asarray(windows, dtype=float))
        return self._unscale(self._forward_scaled(self._scale(windows)))

    def forecast(self, history, steps):
        """Iterated multi-step forecast, feeding predictions back as inputs."""
        history = np.asarray(history, dtype=float)
        if history.size < self.lag:
            raise SeriesTooShort(f"need at least {self.lag} values to seed the forecast")
        window = list(self._scale(history[-self.lag:]))
        out = np.empty(steps)
        for i in range(steps):
            z = float(self._forward_scaled(np.asarray(window)[None, :])[0])
            out[i] = z
            window = window[1:] + [z]
        return self._unscale(out)

    @property
    def weights(self):
        return {"w_in": self.w_in, "b_in": self.b_in,
                "w_out": self.w_out, "b_out": np.array([self.b_out])}


def lagged_windows(series, lag):
    """Rows of ``lag`` consecutive values and the value that follows each."""
    series = np.asarray(series, dtype=float)
    windows = np.lib.stride_tricks.sliding_window_view(series[:-1], lag)
    return windows.copy(), series[lag:].copy()


def train_ann(series, lag=30, hidden_units=40, epochs=200, learning_rate=0.01,
              batch_size=32, seed=0):
    """Fit an :class:`AnnModel` mapping ``lag`` past values to the next one.

    Inputs and target are min-max scaled to [-1, 1] with the bounds of
    ``series``.  Weights start uniform in +-1/sqrt(fan_in), biases at zero.
    """
    series = np.asarray(series, dtype=float)
    if lag < 1 or hidden_units < 1 or epochs < 1:
        raise ValueError("lag, hidden_units and epochs must all be >= 1")
    if series.size <= lag:
        raise SeriesTooShort(f"series of length {series.size} is too short for lag {lag}")
    if not np.all(np.isfinite(series)):
        raise ValueError("series contains non-finite values")

    rng = np.random.default_rng(seed)
    lo, hi = float(series.min()), float(series.max())
    model = AnnModel(lag, hidden_units,
                     rng.uniform(-1, 1, (lag, hidden_units)) / np.sqrt(lag),
                     np.zeros(hidden_units),
                     rng.uniform(-1, 1, hidden_units) / np.sqrt(hidden_units),
                     0.0, lo, hi, seed)
    x, y = lagged_windows(model._scale(series), lag)

    w1, b1, w2, b2 = model.w_in.copy(), model.b_in.copy(), model.w_out.copy(), 0.0
    m = y.size
    for _ in range(epochs):
        order = rng.permutation(m)
        for start in range(0, m, batch_size):
            idx = order[start:start + batch_size]
            xb, yb = x[idx], y[idx]
            hidden = np.tanh(xb @ w1 + b1)
            err = hidden @ w2 + b2 - yb
            # gradient of the batch mean of 0.5 * err**2
            g_out = err / idx.size
            g_hidden = np.outer(g_out, w2) * (1.0 - hidden ** 2)
            w2 -= learning_rate * (hidden.T @ g_out)
            b2 -= learning_rate * g_out.sum()
            w1 -= learning_rate * (xb.T @ g_hidden)
            b1 -= learning_rate * g_hidden.sum(axis=0)
        if not (np.isfinite(b2) and np.all(np.isfinite(w2))):
            raise NonFiniteLoss("training diverged; lower the learning rate")

    return AnnModel(lag, hidden_units, w1, b1, w2, float(b2), lo, hi, seed)
