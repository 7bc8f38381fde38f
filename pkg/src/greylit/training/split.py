"""Deterministic seeded train/test splitting."""

from __future__ import annotations

import math
import random

from greylit.errors import SplitError
from greylit.training.dataset import LabeledDataset

REDRAW_CAP = 20  # re-shuffles allowed before a split is declared infeasible


def split_dataset(ds: LabeledDataset, seed: int):
    """Shuffle with a seeded generator and split 50/50 (odd N: extra record
    to train). Re-draws until both halves contain both classes, up to
    REDRAW_CAP attempts."""
    n = len(ds.records)
    labels = set(ds.labels())
    if n < 2 or len(labels) < 2:
        raise SplitError("dataset too small to split with both classes")
    counts = {lab: ds.labels().count(lab) for lab in labels}
    if min(counts.values()) < 2:
        raise SplitError("each class needs at least 2 records to stratify")

    rng = random.Random(seed)
    n_train = math.ceil(n / 2)
    for _ in range(REDRAW_CAP):
        indices = list(range(n))
        rng.shuffle(indices)
        train_idx, test_idx = indices[:n_train], indices[n_train:]
        train_labels = {ds.records[i].label for i in train_idx}
        test_labels = {ds.records[i].label for i in test_idx}
        if len(train_labels) == 2 and len(test_labels) == 2:
            train = LabeledDataset(
                source=ds.source, records=[ds.records[i] for i in train_idx]
            )
            test = LabeledDataset(
                source=ds.source, records=[ds.records[i] for i in test_idx]
            )
            return train, test
    raise SplitError(f"could not stratify the split within {REDRAW_CAP} redraws")
