"""Model serialization: versioned JSON, exact float round-trip.

Python's json module emits repr-shortest floats, which round-trip exactly
to the same IEEE-754 doubles, so decimal text is sufficient here.
"""

from __future__ import annotations

import json

import numpy as np

from greylit.errors import ParseError
from greylit.models.base import (
    CLASSIFIER_KINDS,
    FeatureContract,
    TrainedClassifier,
)

MODEL_FORMAT_VERSION = 1


def model_to_json(model: TrainedClassifier) -> str:
    params = {}
    for key, value in model.params.items():
        if callable(value):
            raise ParseError(
                f"$.params.{key}",
                "callable parameters (external scorers) cannot be serialized",
            )
        params[key] = value.tolist() if isinstance(value, np.ndarray) else value
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "class_weighting": model.class_weighting,
        "feature_contract": {
            "spec_kind": model.feature_contract.spec_kind,
            "dims": model.feature_contract.dims,
            "field_count": model.feature_contract.field_count,
            "source": model.feature_contract.source,
            "width": model.feature_contract.width,
        },
        "params": params,
        "metadata": model.metadata,
    }
    return json.dumps(doc, indent=2) + "\n"


_ARRAY_PARAMS = {"weights", "priors", "means", "variances"}


def model_from_json(document: str) -> TrainedClassifier:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError("$", f"not valid JSON: {exc}") from exc
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ParseError("$.format_version",
                         f"expected {MODEL_FORMAT_VERSION}")
    kind = doc.get("kind")
    if kind not in CLASSIFIER_KINDS:
        raise ParseError("$.kind", f"unknown kind {kind!r}")
    raw_params = doc.get("params", {})
    params = {
        key: (np.asarray(value, dtype=np.float64) if key in _ARRAY_PARAMS
              else value)
        for key, value in raw_params.items()
    }
    fc = doc.get("feature_contract", {})
    return TrainedClassifier(
        kind=kind,
        params=params,
        class_weighting=doc.get("class_weighting", "uniform"),
        feature_contract=FeatureContract(
            spec_kind=fc.get("spec_kind"),
            dims=fc.get("dims"),
            field_count=fc.get("field_count"),
            source=fc.get("source"),
            width=fc.get("width"),
        ),
        metadata=doc.get("metadata", {}),
    )
