"""Wasserstein distributionally robust training via entropic smoothing."""

from .backend import available_backends, resolve_backend, resolve_workers, warm_up
from .calibrate import (
    EPSILON_FLOOR,
    SIGMA_FLOOR,
    Calibration,
    calibrate,
    resolve_config,
)
from .core import (
    AUX_STREAM_BASE,
    Dataset,
    DualState,
    LabeledSample,
    ModelParams,
    RobustConfig,
    derive_stream,
    sigmoid,
    softplus,
    softplus_inv,
    validate_dataset,
)
from .entropic import (
    DualGradient,
    ObjectiveValue,
    SampleCloud,
    build_clouds,
    dual_gradient,
    dual_objective,
    dual_value_and_grad,
    importance_shift,
    sample_cloud,
)
from .errors import (
    DegeneratePoint,
    DimensionMismatch,
    EmptyDataset,
    InvalidConfig,
    InvalidLabels,
    LabelMismatch,
    NonFiniteObjective,
    NonFiniteValue,
    ParseError,
    WdroError,
)
from .losses import (
    CustomLoss,
    Logistic,
    Loss,
    SquaredError,
    erm_objective,
    erm_value_and_grad,
    grad_features,
    grad_theta,
    loss_value,
)
from .train import (
    FitReport,
    TrainSettings,
    evaluate,
    fit_erm,
    fit_oracle_logistic,
    fit_wdro,
    margin,
    predict,
)
from .transport import GroundCost, cost_features

__version__ = "0.1.0"

__all__ = [
    "AUX_STREAM_BASE",
    "Calibration",
    "CustomLoss",
    "Dataset",
    "DegeneratePoint",
    "DimensionMismatch",
    "DualGradient",
    "DualState",
    "EPSILON_FLOOR",
    "EmptyDataset",
    "FitReport",
    "GroundCost",
    "InvalidConfig",
    "InvalidLabels",
    "LabelMismatch",
    "LabeledSample",
    "Logistic",
    "Loss",
    "ModelParams",
    "NonFiniteObjective",
    "NonFiniteValue",
    "ObjectiveValue",
    "ParseError",
    "RobustConfig",
    "SIGMA_FLOOR",
    "SampleCloud",
    "SquaredError",
    "TrainSettings",
    "WdroError",
    "available_backends",
    "build_clouds",
    "calibrate",
    "cost_features",
    "derive_stream",
    "dual_gradient",
    "dual_objective",
    "dual_value_and_grad",
    "erm_objective",
    "erm_value_and_grad",
    "evaluate",
    "fit_erm",
    "fit_oracle_logistic",
    "fit_wdro",
    "grad_features",
    "grad_theta",
    "importance_shift",
    "loss_value",
    "margin",
    "predict",
    "resolve_backend",
    "resolve_config",
    "resolve_workers",
    "sample_cloud",
    "sigmoid",
    "softplus",
    "softplus_inv",
    "validate_dataset",
    "warm_up",
]
