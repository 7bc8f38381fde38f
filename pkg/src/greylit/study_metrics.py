"""Summary statistics for paired usability-study measurements."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

from greylit.errors import ContractError, PairingError
from greylit.training.metrics import sus_score

CONDITIONS = ("manual", "tool")


@dataclass(frozen=True)
class StudyRecord:
    participant_id: str
    condition: str  # manual | tool
    ttfr_seconds: float
    items_inspected_to_10: int
    minutes_to_10: float
    sus_responses: Optional[tuple] = None

    def __post_init__(self):
        if self.condition not in CONDITIONS:
            raise ContractError(f"unknown condition {self.condition!r}")
        if self.ttfr_seconds < 0 or self.minutes_to_10 < 0:
            raise ContractError("time measurements must be non-negative")
        if self.items_inspected_to_10 < 1:
            raise ContractError("items_inspected_to_10 must be positive")
        if self.sus_responses is not None:
            if self.condition != "tool":
                raise ContractError("sus_responses only apply to the tool condition")
            object.__setattr__(self, "sus_responses", tuple(self.sus_responses))


def _mean(values):
    return sum(values) / len(values)


def _sample_std(values):
    # undefined for n=1; callers report it as absent
    if len(values) < 2:
        return None
    mu = _mean(values)
    return math.sqrt(sum((v - mu) ** 2 for v in values) / (len(values) - 1))


def summarize(records) -> dict:
    """Per-condition means plus SUS mean and sample standard deviation.

    Records must pair every participant across both conditions.
    """
    records = list(records)
    if not records:
        raise ContractError("no study records")
    seen = {}
    for rec in records:
        seen.setdefault(rec.participant_id, set()).add(rec.condition)
    unpaired = sorted(p for p, conds in seen.items() if conds != set(CONDITIONS))
    if unpaired:
        raise PairingError(f"participants missing a condition: {unpaired}")

    summary = {}
    for condition in CONDITIONS:
        group = [r for r in records if r.condition == condition]
        summary[condition] = {
            "ttfr_seconds_mean": _mean([r.ttfr_seconds for r in group]),
            "items_inspected_to_10_mean": _mean(
                [r.items_inspected_to_10 for r in group]
            ),
            "minutes_to_10_mean": _mean([r.minutes_to_10 for r in group]),
        }
    sus_values = [
        sus_score(r.sus_responses) for r in records
        if r.condition == "tool" and r.sus_responses is not None
    ]
    summary["sus"] = {
        "mean": _mean(sus_values) if sus_values else None,
        "std": _sample_std(sus_values) if sus_values else None,
        "n": len(sus_values),
    }
    return summary


def load_study_records(path):
    """Read a record-per-line study file."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            records.append(StudyRecord(
                participant_id=str(raw["participant_id"]),
                condition=raw["condition"],
                ttfr_seconds=raw["ttfr_seconds"],
                items_inspected_to_10=raw["items_inspected_to_10"],
                minutes_to_10=raw["minutes_to_10"],
                sus_responses=tuple(raw["sus_responses"])
                if raw.get("sus_responses") else None,
            ))
    return records
