"""AR-modified ensemble postprocessing: AR-EMOS, local EMOS and their spread-adjusted pool."""

from .artime import (
    ARModel,
    ErrorSeries,
    ar_modified_forecast,
    fit_ar_aic,
    fit_yule_walker,
    process_variance,
    psi_weights,
    sample_autocovariance,
    select_order_aic,
)
from .emos import EmosParams, GaussianPredictive, emos_predict, ensemble_stats, fit_emos, gaussian_crps
from .ensemble import (
    ARModifiedEnsemble,
    EnsembleForecast,
    StationSeries,
    error_series,
    modify_ensemble,
    summarize,
)
from .pooling import SlpMixture, SlpSearchGrid, ar_emos_predict, dss, grid_search_slp, slp_cdf, slp_crps, slp_moments
from .pipeline import RunConfig, SyntheticSpec, emit_report, generate_synthetic, ingest, run_experiment
from .verification import (
    diebold_mariano,
    ljung_box,
    mae,
    order_frequency_table,
    pit_value,
    pit_variance,
    rank_histogram,
    rmv,
)

__version__ = "0.1.0"
