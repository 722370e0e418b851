"""Flow-record traffic classification with stacked random-weight reservoirs.

Thin re-export of the compiled extension: dataset synthesis and splitting,
predictive-power feature scoring, reservoir training/prediction, topology
search, Shapley attribution, and evaluation metrics.
"""

from wannflow._core import (
    Category,
    ComputeError,
    ConfigError,
    DataError,
    FeatureSchema,
    FlowDataset,
    NormStats,
    ReservoirGenome,
    ReservoirModel,
    SearchConfig,
    SynthSpec,
    __version__,
    evaluate_model,
    exact_shapley,
    f_score,
    fit_normalize,
    load_csv,
    load_model,
    mae,
    pearson_r,
    pps_score,
    predict,
    run_search,
    sampled_shapley,
    save_model,
    select_features,
    stratified_split,
    subset_features,
    synth_generate,
    train_model,
)

__all__ = [
    "Category",
    "ComputeError",
    "ConfigError",
    "DataError",
    "FeatureSchema",
    "FlowDataset",
    "NormStats",
    "ReservoirGenome",
    "ReservoirModel",
    "SearchConfig",
    "SynthSpec",
    "__version__",
    "evaluate_model",
    "exact_shapley",
    "f_score",
    "fit_normalize",
    "load_csv",
    "load_model",
    "mae",
    "pearson_r",
    "pps_score",
    "predict",
    "run_search",
    "sampled_shapley",
    "save_model",
    "select_features",
    "stratified_split",
    "subset_features",
    "synth_generate",
    "train_model",
]
