"""Trained-classifier values, prediction, and ranking."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from greylit.errors import ContractError, DegenerateTrainingError, DimensionError

CLASSIFIER_KINDS = (
    "gaussian_nb",
    "logistic_regression",
    "ridge",
    "linear_svc",
    "external_boosted_trees",  # pluggable slot; no trainer ships for it
)

RELEVANT = "relevant"
IRRELEVANT = "irrelevant"

# Kinds whose predictions carry a probability.
PROBABILISTIC_KINDS = {"gaussian_nb", "logistic_regression"}


@dataclass(frozen=True)
class FeatureContract:
    """What a model was trained on; predictions must match it."""

    spec_kind: Optional[str] = None
    dims: Optional[int] = None
    field_count: Optional[int] = None
    source: Optional[str] = None
    width: Optional[int] = None


@dataclass(frozen=True)
class TrainedClassifier:
    kind: str
    params: dict
    class_weighting: str = "uniform"
    feature_contract: FeatureContract = field(default_factory=FeatureContract)
    metadata: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Prediction:
    label: str
    margin: float
    probability: Optional[float] = None

    def __post_init__(self):
        if self.probability is not None and not 0.0 <= self.probability <= 1.0:
            raise ContractError(f"probability out of range: {self.probability}")
        expected = RELEVANT if self.margin >= 0 else IRRELEVANT
        if self.label != expected:
            raise ContractError("label inconsistent with margin sign")


@dataclass(frozen=True)
class RankedResult:
    item_id: str
    prediction: Prediction
    rank: int
    score: float


def as_matrix(X):
    """Accept a list of FeatureVector or array-likes; return a 2-D float array."""
    rows = []
    width = None
    for x in X:
        values = getattr(x, "values", x)
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1:
            raise DimensionError("each sample must be a 1-D vector")
        if width is None:
            width = arr.shape[0]
        elif arr.shape[0] != width:
            raise DimensionError(
                f"width mismatch between samples: {arr.shape[0]} vs {width}"
            )
        rows.append(arr)
    if not rows:
        raise DegenerateTrainingError("no training samples")
    return np.vstack(rows)


def as_signs(y):
    """Map relevant/irrelevant labels (or +-1 / 0-1) to a +-1 vector."""
    out = []
    for label in y:
        if label in (RELEVANT, 1, True, "+1"):
            out.append(1.0)
        elif label in (IRRELEVANT, 0, -1, False, "-1"):
            out.append(-1.0)
        else:
            raise ContractError(f"unknown label {label!r}")
    return np.asarray(out)


def check_training_inputs(X, y):
    Xm = as_matrix(X)
    ys = as_signs(y)
    if Xm.shape[0] != ys.shape[0]:
        raise DimensionError("X and y lengths differ")
    if len(np.unique(ys)) < 2:
        raise DegenerateTrainingError("training labels contain a single class")
    return Xm, ys


def sample_weights(ys, class_weighting):
    """Per-example weights: 1 for uniform; N/(2*N_class) for balanced."""
    if class_weighting == "uniform":
        return np.ones_like(ys)
    if class_weighting != "balanced":
        raise ContractError(f"unknown class_weighting {class_weighting!r}")
    n = ys.shape[0]
    n_pos = int(np.sum(ys > 0))
    n_neg = n - n_pos
    weights = np.where(ys > 0, n / (2.0 * n_pos), n / (2.0 * n_neg))
    return weights


def contract_from(X, source=None):
    first = X[0]
    if hasattr(first, "spec"):
        return FeatureContract(
            spec_kind=first.spec.kind,
            dims=first.dims,
            field_count=first.field_count,
            source=source,
            width=first.values.shape[0],
        )
    return FeatureContract(source=source, width=len(np.asarray(first).ravel()))


def _check_predict_width(model, arr):
    width = model.feature_contract.width
    if width is not None and arr.shape[0] != width:
        raise DimensionError(
            f"feature width {arr.shape[0]} does not match the model's "
            f"contract width {width}"
        )


def predict(model: TrainedClassifier, x) -> Prediction:
    """Deterministic per-kind prediction; boundary convention margin >= 0
    (probability >= 0.5) maps to relevant."""
    arr = np.asarray(getattr(x, "values", x), dtype=np.float64)
    _check_predict_width(model, arr)
    if model.kind == "gaussian_nb":
        from greylit.models.gaussian_nb import posterior_relevant

        p = posterior_relevant(model.params, arr)
        return Prediction(
            label=RELEVANT if p >= 0.5 else IRRELEVANT,
            margin=p - 0.5,
            probability=p,
        )
    if model.kind == "logistic_regression":
        z = float(np.dot(model.params["weights"], arr) + model.params["bias"])
        p = 1.0 / (1.0 + np.exp(-z))
        return Prediction(
            label=RELEVANT if p >= 0.5 else IRRELEVANT,
            margin=p - 0.5,
            probability=float(p),
        )
    if model.kind in ("ridge", "linear_svc"):
        margin = float(np.dot(model.params["weights"], arr) + model.params["bias"])
        return Prediction(
            label=RELEVANT if margin >= 0 else IRRELEVANT, margin=margin
        )
    if model.kind == "external_boosted_trees":
        scorer = model.params.get("scorer")
        if scorer is None:
            raise ContractError(
                "external_boosted_trees requires a plugged-in scorer"
            )
        margin = float(scorer(arr))
        return Prediction(
            label=RELEVANT if margin >= 0 else IRRELEVANT, margin=margin
        )
    raise ContractError(f"unknown classifier kind {model.kind!r}")


def rank_items(predictions) -> list:
    """Order (item_id, Prediction) pairs by probability when available, else
    margin; descending, stable for ties; ranks assigned 1..N."""
    pairs = list(predictions)
    if not pairs:
        return []
    has_prob = [p.probability is not None for _, p in pairs]
    if any(has_prob) and not all(has_prob):
        raise ContractError("mixed model kinds: probability present on only "
                            "some predictions")
    use_probability = all(has_prob)

    def score(pred):
        return pred.probability if use_probability else pred.margin

    ordered = sorted(
        enumerate(pairs), key=lambda e: (-score(e[1][1]), e[0])
    )
    return [
        RankedResult(item_id=item_id, prediction=pred, rank=i + 1,
                     score=score(pred))
        for i, (_, (item_id, pred)) in enumerate(ordered)
    ]
