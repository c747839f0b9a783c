"""
Wavelet-ANN forecasting of a seasonal series
============================================

The series is split into Haar MODWT components, each component gets its
own small neural network, and the component forecasts are summed.
"""

# %%
import numpy as np

from eofcast.evaluation import forecast_metrics, naive_forecast
from eofcast.forecast import ForecastConfig, fit_wavelet_ann
from eofcast.wavelet import modwt_mra

# %%
# Five years of a daily annual + weekly cycle with noise; the last year
# is held out.
from eofcast.synthetic import seasonal_series

x = seasonal_series(4 * 365 + 1 + 365, seed=1)
train, test = x[:1461], x[1461:]

# %%
# The multiresolution analysis is additive: the details and the smooth
# add back to the series exactly.
mra = modwt_mra(train, levels=10)
print("components:", mra.components.shape)
print("max |sum - x|:", np.abs(mra.components.sum(axis=0) - train).max())
print("variance by component:", np.round(mra.components.var(axis=1), 3))

# %%
# Fit one network per component and forecast a year ahead recursively.
cfg = ForecastConfig(horizon=365, seed=1)
fit = fit_wavelet_ann(train, cfg)
print(len(fit.models), "networks, lag", cfg.lag, "hidden units", cfg.hidden_units)

# %%
# Compare with persistence (repeat the last training value).
for label, pred in (("wavelet-ann", fit.forecast), ("persistence", naive_forecast(train, 365))):
    row = forecast_metrics(test, pred, train, label)
    print(f"{label:12s} MAE {row.mae:.3f}  RMSE {row.rmse:.3f}  MASE {row.mase:.3f}")
