"""Exhaustive hyperparameter search with seeded stratified cross-validation."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np

from greylit.errors import ContractError, FoldError
from greylit.models.base import IRRELEVANT, RELEVANT, predict
from greylit.models.gaussian_nb import fit_gaussian_nb
from greylit.models.linear import fit_linear_svc, fit_logistic_regression, fit_ridge
from greylit.training.metrics import compute_metrics

DEFAULT_FOLDS = 5

FITTERS = {
    "gaussian_nb": fit_gaussian_nb,
    "logistic_regression": fit_logistic_regression,
    "ridge": fit_ridge,
    "linear_svc": fit_linear_svc,
}

# Default axes per classifier kind; class weighting is itself a grid axis.
DEFAULT_GRIDS = {
    "gaussian_nb": {
        "variance_smoothing": [1e-9, 1e-7, 1e-5],
        "class_weighting": ["uniform", "balanced"],
    },
    "logistic_regression": {
        "regularization_strength": [0.01, 0.1, 1.0, 10.0, 100.0],
        "class_weighting": ["uniform", "balanced"],
    },
    "ridge": {
        "regularization_strength": [0.01, 0.1, 1.0, 10.0, 100.0],
        "class_weighting": ["uniform", "balanced"],
    },
    "linear_svc": {
        "regularization_strength": [0.01, 0.1, 1.0, 10.0, 100.0],
        "class_weighting": ["uniform", "balanced"],
    },
}


@dataclass(frozen=True)
class GridSpec:
    kind: str
    axes: dict = field(default_factory=dict)
    folds: int = DEFAULT_FOLDS

    def __post_init__(self):
        axes = dict(self.axes) or dict(DEFAULT_GRIDS[self.kind])
        if any(not values for values in axes.values()):
            raise ContractError("every grid axis needs at least one value")
        object.__setattr__(self, "axes", axes)

    def points(self):
        """Deterministic cross-product enumeration: axes in insertion order,
        values in given order."""
        names = list(self.axes)
        for combo in itertools.product(*(self.axes[n] for n in names)):
            yield dict(zip(names, combo))


def fit_model(kind, X, y, hyperparams, source=None):
    if kind not in FITTERS:
        raise ContractError(f"no trainer registered for kind {kind!r}")
    return FITTERS[kind](X, y, source=source, **hyperparams)


def stratified_folds(y, folds, seed):
    """Round-robin assignment of seeded-shuffled per-class indices."""
    by_class = {}
    for i, label in enumerate(y):
        by_class.setdefault(label, []).append(i)
    if min(len(v) for v in by_class.values()) < folds:
        raise FoldError(
            f"fold count {folds} exceeds the minority class size"
        )
    rng = random.Random(seed)
    assignment = [[] for _ in range(folds)]
    for label in sorted(by_class):
        indices = by_class[label][:]
        rng.shuffle(indices)
        for j, idx in enumerate(indices):
            assignment[j % folds].append(idx)
    return [sorted(fold) for fold in assignment]


def cv_score(kind, X, y, hyperparams, folds, seed):
    """Mean balanced accuracy over stratified k-fold CV."""
    X = np.asarray(X, dtype=np.float64)
    y = list(y)
    fold_indices = stratified_folds(y, folds, seed)
    scores = []
    for held_out in fold_indices:
        held = set(held_out)
        train_idx = [i for i in range(len(y)) if i not in held]
        model = fit_model(kind, X[train_idx], [y[i] for i in train_idx],
                          hyperparams)
        preds = [predict(model, X[i]).label for i in held_out]
        truth = [y[i] for i in held_out]
        scores.append(compute_metrics(truth, preds).balanced_accuracy)
    return float(np.mean(scores))


def grid_search(X, y, grid: GridSpec, seed):
    """Exhaustive search; ties broken by the earliest enumeration point.

    Returns (best hyperparameter dict, best CV score).
    """
    best = None
    for point in grid.points():
        score = cv_score(grid.kind, X, y, point, grid.folds, seed)
        if best is None or score > best[1]:
            best = (point, score)
    return best
