"""Feature derivation from (intent embedding, field embeddings) pairs.

Eight feature kinds are supported; each turns one embedding pair into a
fixed-width block, and blocks for all canonical fields of a source are
concatenated in order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from greylit import sources
from greylit.embeddings.vectors import (
    EmbeddingVector,
    cosine_distance,
    euclidean_distance,
    l1_distance,
)
from greylit.errors import DimensionError

FEATURE_KINDS = (
    "cosine",
    "euclidean",
    "l1",
    "cosine_euclidean",
    "all_distances",
    "abs_diff",
    "product",
    "all_features",
)


@dataclass(frozen=True)
class FeatureSpec:
    kind: str

    def __post_init__(self):
        if self.kind not in FEATURE_KINDS:
            raise ValueError(f"unknown feature kind {self.kind!r}")


def feature_width(spec: FeatureSpec, dims: int) -> int:
    """Per-field block width for a spec at a given dimensionality."""
    return {
        "cosine": 1,
        "euclidean": 1,
        "l1": 1,
        "cosine_euclidean": 2,
        "all_distances": 3,
        "abs_diff": dims,
        "product": dims,
        "all_features": 3 + 2 * dims,
    }[spec.kind]


@dataclass(frozen=True)
class FieldEmbeddingSet:
    item_id: str
    source: str
    fields: dict  # field name -> EmbeddingVector, canonical-order subset

    def __post_init__(self):
        vecs = list(self.fields.values())
        if vecs:
            dims, model = vecs[0].dims, vecs[0].model_id
            for v in vecs[1:]:
                if v.dims != dims or v.model_id != model:
                    raise DimensionError(
                        "all field embeddings must share dims and model_id"
                    )

    @property
    def field_order(self):
        return sources.EMBED_FIELDS[self.source]

    @property
    def dims(self):
        vecs = list(self.fields.values())
        return vecs[0].dims if vecs else None


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    spec: FeatureSpec
    field_count: int
    dims: int

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        expected = self.field_count * feature_width(self.spec, self.dims)
        if arr.shape != (expected,):
            raise DimensionError(
                f"feature vector length {arr.shape} != field_count x width "
                f"({expected})"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)


def _block(intent: EmbeddingVector, fld: EmbeddingVector, kind: str) -> np.ndarray:
    if kind == "cosine":
        return np.array([cosine_distance(intent, fld)])
    if kind == "euclidean":
        return np.array([euclidean_distance(intent, fld)])
    if kind == "l1":
        return np.array([l1_distance(intent, fld)])
    if kind == "cosine_euclidean":
        return np.array(
            [cosine_distance(intent, fld), euclidean_distance(intent, fld)]
        )
    if kind == "all_distances":
        return np.array([
            cosine_distance(intent, fld),
            euclidean_distance(intent, fld),
            l1_distance(intent, fld),
        ])
    if kind == "abs_diff":
        return np.abs(intent.values - fld.values)
    if kind == "product":
        return intent.values * fld.values
    # all_features: the three distances, then abs_diff, then product
    return np.concatenate([
        _block(intent, fld, "all_distances"),
        np.abs(intent.values - fld.values),
        intent.values * fld.values,
    ])


def build_features(intent_emb: EmbeddingVector, field_embs: FieldEmbeddingSet,
                   spec: FeatureSpec) -> FeatureVector:
    """Concatenate one feature block per canonical field of the item's source.

    Missing textual fields contribute a zero block of the correct width so the
    total width stays constant per (source, spec, dims).
    """
    dims = intent_emb.dims
    if field_embs.dims is not None and field_embs.dims != dims:
        raise DimensionError(
            f"intent dims {dims} != field dims {field_embs.dims}"
        )
    width = feature_width(spec, dims)
    order = field_embs.field_order
    blocks = []
    for name in order:
        vec = field_embs.fields.get(name)
        if vec is None:
            blocks.append(np.zeros(width))
        else:
            blocks.append(_block(intent_emb, vec, spec.kind))
    values = np.concatenate(blocks) if blocks else np.zeros(0)
    return FeatureVector(values=values, spec=spec, field_count=len(order), dims=dims)
