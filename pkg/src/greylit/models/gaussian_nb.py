"""Gaussian Naive Bayes with variance smoothing."""

from __future__ import annotations

import numpy as np

from greylit.models.base import (
    TrainedClassifier,
    check_training_inputs,
    contract_from,
)

DEFAULT_VARIANCE_SMOOTHING = 1e-9

# Class order in all parameter arrays: index 0 = irrelevant, 1 = relevant.


def fit_gaussian_nb(X, y, class_weighting="uniform",
                    variance_smoothing=DEFAULT_VARIANCE_SMOOTHING,
                    source=None) -> TrainedClassifier:
    """Per-class maximum-likelihood means/variances; variances are padded by
    variance_smoothing times the largest overall feature variance. Priors are
    class frequencies (uniform weighting) or equal (balanced)."""
    Xm, ys = check_training_inputs(X, y)
    epsilon = variance_smoothing * float(np.max(np.var(Xm, axis=0)))
    means, variances, counts = [], [], []
    for sign in (-1.0, 1.0):
        rows = Xm[ys == sign]
        counts.append(rows.shape[0])
        means.append(np.mean(rows, axis=0))
        variances.append(np.var(rows, axis=0) + epsilon)
    if class_weighting == "balanced":
        priors = np.array([0.5, 0.5])
    else:
        priors = np.asarray(counts, dtype=np.float64) / Xm.shape[0]
    params = {
        "priors": priors,
        "means": np.vstack(means),
        "variances": np.vstack(variances),
        "variance_smoothing": variance_smoothing,
    }
    return TrainedClassifier(
        kind="gaussian_nb",
        params=params,
        class_weighting=class_weighting,
        feature_contract=contract_from(X, source=source),
    )


def class_log_posteriors(params, x):
    """Unnormalized per-class log posteriors, then log-normalized."""
    means = params["means"]
    variances = params["variances"]
    log_prior = np.log(params["priors"])
    log_likelihood = -0.5 * np.sum(
        np.log(2.0 * np.pi * variances) + (x - means) ** 2 / variances, axis=1
    )
    joint = log_prior + log_likelihood
    # log-sum-exp normalization
    peak = np.max(joint)
    log_norm = peak + np.log(np.sum(np.exp(joint - peak)))
    return joint - log_norm


def posterior_relevant(params, x) -> float:
    return float(np.exp(class_log_posteriors(params, x)[1]))
