"""Classification metrics and the usability-scale score."""

from __future__ import annotations

from dataclasses import dataclass

from greylit.errors import ContractError
from greylit.models.base import RELEVANT


@dataclass(frozen=True)
class EvalMetrics:
    balanced_accuracy: float
    precision: float
    recall: float
    f1: float
    confusion: tuple  # (tp, fp, fn, tn), relevant is the positive class


def _ratio(num, den):
    return num / den if den else 0.0  # 0/0 is defined as 0


def compute_metrics(y_true, y_pred) -> EvalMetrics:
    """Precision/recall/F1/balanced accuracy with relevant as positive."""
    if len(y_true) != len(y_pred):
        raise ContractError("y_true and y_pred lengths differ")
    if not y_true:
        raise ContractError("empty label lists")
    tp = fp = fn = tn = 0
    for truth, pred in zip(y_true, y_pred):
        if truth == RELEVANT:
            if pred == RELEVANT:
                tp += 1
            else:
                fn += 1
        else:
            if pred == RELEVANT:
                fp += 1
            else:
                tn += 1
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = _ratio(2 * precision * recall, precision + recall)
    balanced_accuracy = (_ratio(tp, tp + fn) + _ratio(tn, tn + fp)) / 2
    return EvalMetrics(
        balanced_accuracy=balanced_accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        confusion=(tp, fp, fn, tn),
    )


def sus_score(responses) -> float:
    """Ten 5-point items to a 0-100 usability value.

    Odd positions (1-indexed) are positive items scored response - 1; even
    positions are negative items scored 5 - response; the adjusted sum is
    multiplied by 2.5.
    """
    responses = list(responses)
    if len(responses) != 10:
        raise ContractError(f"expected 10 responses, got {len(responses)}")
    total = 0
    for i, r in enumerate(responses):
        if not isinstance(r, int) or isinstance(r, bool) or not 1 <= r <= 5:
            raise ContractError(f"response {i + 1} out of range [1, 5]: {r!r}")
        total += (r - 1) if i % 2 == 0 else (5 - r)
    return total * 2.5
