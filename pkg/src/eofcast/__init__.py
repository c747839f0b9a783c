"""Cluster-wise EOF decomposition and Wavelet-ANN forecasting of gridded fields."""
from .clustering import (ClusterModel, assign_grid, cluster_hierarchical,
                         partition_similarity)
from .coherence import AnnualSeriesMatrix, dof, seasonal_series, var_sai
from .dtw import DistanceMatrix, dtw_distance, dtw_matrix
from .eof import (EofModel, SpatialCoefficients, center_scale, decompose,
                  reconstruct, reconstruct_extended, spatial_coefficients,
                  svd_eof, truncate_rank)
from .evaluation import (AccuracyRow, alpha_stability, forecast_metrics,
                         naive_forecast)
from .forecast import ForecastConfig, forecast_eofs, forecast_series
from .grid import (Location, SpatioTemporalField, TimeAxis, ingest_tidy_csv,
                   subset)
from .wavelet import MraDecomposition, modwt, modwt_mra

__version__ = "0.1.0"
