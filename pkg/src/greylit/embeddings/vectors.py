"""Embedding vectors and the distance functions over them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from greylit.errors import DegenerateInputError, DimensionError


@dataclass(frozen=True)
class EmbeddingVector:
    values: np.ndarray
    model_id: str = ""
    normalized: bool = False

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise DimensionError("embedding values must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise DegenerateInputError("embedding contains non-finite values")
        if self.normalized and abs(np.linalg.norm(arr) - 1.0) > 1e-6:
            raise DegenerateInputError("vector marked normalized is not unit norm")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def dims(self) -> int:
        return self.values.shape[0]


def _check_dims(a: EmbeddingVector, b: EmbeddingVector):
    if a.dims != b.dims:
        raise DimensionError(f"dims mismatch: {a.dims} vs {b.dims}")


def cosine_distance(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """1 - cos(a, b); in [0, 2]."""
    _check_dims(a, b)
    na, nb = np.linalg.norm(a.values), np.linalg.norm(b.values)
    if na == 0.0 or nb == 0.0:
        raise DegenerateInputError("cosine distance undefined for zero vector")
    return float(1.0 - np.dot(a.values, b.values) / (na * nb))


def euclidean_distance(a: EmbeddingVector, b: EmbeddingVector) -> float:
    _check_dims(a, b)
    return float(np.linalg.norm(a.values - b.values))


def l1_distance(a: EmbeddingVector, b: EmbeddingVector) -> float:
    _check_dims(a, b)
    return float(np.sum(np.abs(a.values - b.values)))
