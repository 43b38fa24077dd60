"""Robust discriminant analysis: classical and MCD-based LDA/QDA with
outlier-aware prediction, per-case diagnostics and SVG plots."""

from .data import (
    LabeledDataset,
    SyntheticConfig,
    generate_contaminated_pair,
    load_csv,
    save_csv,
)
from .diagnostics import (
    CaseDiagnostics,
    ConfusionMatrix,
    FarnessModel,
    accuracy,
    compute_diagnostics,
    confusion,
    farness,
    fit_farness,
    pac,
    posteriors,
    qq_data,
    silhouette,
    silhouette_summary,
)
from .discriminant import (
    DAModel,
    DASpec,
    DiscriminantClassifier,
    Prediction,
    fit,
    linear_score,
    load_model,
    predict,
    predict_batch,
    quadratic_score,
    save_model,
)
from .errors import (
    ConfigurationError,
    DegenerateClassError,
    ExactFitError,
    IngestionError,
    PlotError,
    RobustDAError,
    ShapeError,
)
from .estimators import (
    EstimatorConfig,
    LocationScatter,
    c_step,
    chi2_cdf,
    chi2_quantile,
    classical_moments,
    consistency_factor,
    exact_mcd,
    fast_mcd,
    mahalanobis,
    pooled_covariance,
)

__version__ = "0.1.0"

__all__ = [
    "CaseDiagnostics",
    "ConfigurationError",
    "ConfusionMatrix",
    "DAModel",
    "DASpec",
    "DegenerateClassError",
    "DiscriminantClassifier",
    "EstimatorConfig",
    "ExactFitError",
    "FarnessModel",
    "IngestionError",
    "LabeledDataset",
    "LocationScatter",
    "PlotError",
    "Prediction",
    "RobustDAError",
    "ShapeError",
    "SyntheticConfig",
    "accuracy",
    "c_step",
    "chi2_cdf",
    "chi2_quantile",
    "classical_moments",
    "compute_diagnostics",
    "confusion",
    "consistency_factor",
    "exact_mcd",
    "farness",
    "fast_mcd",
    "fit",
    "fit_farness",
    "generate_contaminated_pair",
    "linear_score",
    "load_csv",
    "load_model",
    "mahalanobis",
    "pac",
    "pooled_covariance",
    "posteriors",
    "predict",
    "predict_batch",
    "qq_data",
    "quadratic_score",
    "save_csv",
    "save_model",
    "silhouette",
    "silhouette_summary",
]
