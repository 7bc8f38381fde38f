from greylit.models.base import (
    CLASSIFIER_KINDS,
    FeatureContract,
    Prediction,
    RankedResult,
    TrainedClassifier,
    predict,
    rank_items,
)
from greylit.models.gaussian_nb import fit_gaussian_nb
from greylit.models.linear import (
    fit_linear_svc,
    fit_logistic_regression,
    fit_ridge,
    logistic_objective,
)
from greylit.models.serialize import model_from_json, model_to_json
from greylit.models.baseline import llm_relevance_baseline

__all__ = [
    "CLASSIFIER_KINDS",
    "FeatureContract",
    "Prediction",
    "RankedResult",
    "TrainedClassifier",
    "predict",
    "rank_items",
    "fit_gaussian_nb",
    "fit_linear_svc",
    "fit_logistic_regression",
    "fit_ridge",
    "logistic_objective",
    "model_from_json",
    "model_to_json",
    "llm_relevance_baseline",
]
