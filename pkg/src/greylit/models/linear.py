"""Linear classifiers: logistic regression, ridge, and a linear SVC."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from greylit.models.base import (
    TrainedClassifier,
    check_training_inputs,
    contract_from,
    sample_weights,
)

GRADIENT_TOLERANCE = 1e-6
LOGISTIC_MAX_ITER = 1000
SVC_MAX_ITER = 5000
SVC_STALL_TOLERANCE = 1e-10
SVC_STALL_PATIENCE = 100


def logistic_objective(theta, Xm, ys, weights, reg):
    """Weight-normalized L2-regularized negative log-likelihood and gradient.

    theta is [w_1..w_d, bias]; the bias is unregularized. The data term is
    divided by the total sample weight so balanced reweighting of a
    class-duplicated dataset matches uniform weighting of the original.
    """
    w, b = theta[:-1], theta[-1]
    total = float(np.sum(weights))
    margins = ys * (Xm @ w + b)
    value = float(
        np.sum(weights * np.logaddexp(0.0, -margins)) / total
        + 0.5 * reg * np.dot(w, w)
    )
    # d/dm log(1+exp(-m)) = -sigmoid(-m)
    coeff = weights * (-_sigmoid(-margins)) * ys / total
    grad_w = Xm.T @ coeff + reg * w
    grad_b = float(np.sum(coeff))
    return value, np.append(grad_w, grad_b)


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def fit_logistic_regression(X, y, class_weighting="uniform",
                            regularization_strength=1.0,
                            source=None) -> TrainedClassifier:
    """L-BFGS minimization of the regularized log loss, analytic gradient.

    Non-convergence at the iteration cap is not an error; it is reported in
    the training metadata.
    """
    Xm, ys = check_training_inputs(X, y)
    weights = sample_weights(ys, class_weighting)
    reg = regularization_strength
    theta0 = np.zeros(Xm.shape[1] + 1)
    result = minimize(
        logistic_objective,
        theta0,
        args=(Xm, ys, weights, reg),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": LOGISTIC_MAX_ITER, "gtol": 1e-9, "ftol": 1e-14},
    )
    _, grad = logistic_objective(result.x, Xm, ys, weights, reg)
    converged = bool(np.linalg.norm(grad) <= GRADIENT_TOLERANCE)
    params = {
        "weights": result.x[:-1],
        "bias": float(result.x[-1]),
        "regularization_strength": reg,
    }
    return TrainedClassifier(
        kind="logistic_regression",
        params=params,
        class_weighting=class_weighting,
        feature_contract=contract_from(X, source=source),
        metadata={"converged": converged, "iterations": int(result.nit)},
    )


def fit_ridge(X, y, class_weighting="uniform", regularization_strength=1.0,
              source=None) -> TrainedClassifier:
    """Weighted least squares on +-1 targets, closed-form normal equations.

    The weight vector is L2-penalized; the bias is not. Per-example weights
    are normalized by their total, matching the logistic convention.
    """
    Xm, ys = check_training_inputs(X, y)
    weights = sample_weights(ys, class_weighting)
    weights = weights / np.sum(weights)
    d = Xm.shape[1]
    A = np.hstack([Xm, np.ones((Xm.shape[0], 1))])
    penalty = regularization_strength * np.eye(d + 1)
    penalty[d, d] = 0.0
    lhs = A.T @ (weights[:, None] * A) + penalty
    rhs = A.T @ (weights * ys)
    theta = np.linalg.solve(lhs, rhs)
    params = {
        "weights": theta[:d],
        "bias": float(theta[d]),
        "regularization_strength": regularization_strength,
    }
    return TrainedClassifier(
        kind="ridge",
        params=params,
        class_weighting=class_weighting,
        feature_contract=contract_from(X, source=source),
    )


def fit_linear_svc(X, y, class_weighting="uniform", regularization_strength=1.0,
                   source=None, seed=0) -> TrainedClassifier:
    """Hinge loss + L2 penalty by deterministic full-batch subgradient descent.

    Step size 1/(reg * (t+1)); stops at SVC_MAX_ITER or when the best
    objective stalls for SVC_STALL_PATIENCE iterations. The returned
    parameters are the best-objective iterate, making the run a pure
    function of its inputs (seed is accepted for interface symmetry).
    """
    Xm, ys = check_training_inputs(X, y)
    weights = sample_weights(ys, class_weighting)
    total = float(np.sum(weights))
    reg = regularization_strength

    def objective(w, b):
        margins = ys * (Xm @ w + b)
        hinge = np.maximum(0.0, 1.0 - margins)
        return float(np.sum(weights * hinge) / total + 0.5 * reg * np.dot(w, w))

    w = np.zeros(Xm.shape[1])
    b = 0.0
    best = (objective(w, b), w.copy(), b)
    stall = 0
    for t in range(SVC_MAX_ITER):
        margins = ys * (Xm @ w + b)
        active = margins < 1.0
        coeff = np.where(active, weights * ys, 0.0) / total
        grad_w = -(Xm.T @ coeff) + reg * w
        grad_b = -float(np.sum(coeff))
        step = 1.0 / (reg * (t + 1.0))
        w -= step * grad_w
        b -= step * grad_b
        value = objective(w, b)
        if value < best[0] - SVC_STALL_TOLERANCE:
            best = (value, w.copy(), b)
            stall = 0
        else:
            stall += 1
            if stall >= SVC_STALL_PATIENCE:
                break
    _, w_best, b_best = best
    params = {
        "weights": w_best,
        "bias": float(b_best),
        "regularization_strength": reg,
    }
    return TrainedClassifier(
        kind="linear_svc",
        params=params,
        class_weighting=class_weighting,
        feature_contract=contract_from(X, source=source),
        metadata={"iterations": t + 1, "objective": best[0]},
    )
