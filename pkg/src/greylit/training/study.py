"""The full model-selection protocol: every combination of input
representation, embedding dimensionality, and classifier, per source and
embedding mode, with per-(source, mode) best-configuration selection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from greylit.embeddings.features import FeatureSpec, FieldEmbeddingSet, build_features
from greylit.errors import GreylitError
from greylit.models.base import predict
from greylit.training.gridsearch import GridSpec, fit_model, grid_search
from greylit.training.metrics import EvalMetrics, compute_metrics
from greylit.training.split import split_dataset
from greylit import sources as source_defs


@dataclass(frozen=True)
class EvalReport:
    metrics: EvalMetrics
    config: dict  # source, embedding_model_id, dims, spec, kind, hyperparams


@dataclass
class StudyResult:
    matrix: list  # every evaluated EvalReport, enumeration order
    selections: dict  # (source, embedding_model_id) -> EvalReport

    def best_for(self, source, mode):
        return self.selections.get((source, mode))


def _embed_record_fields(embedder, record, mode, dims):
    fields = {}
    item = record.item
    texts = {"title": item.title, "snippet": item.snippet}
    for name in source_defs.EMBED_FIELDS[item.source]:
        text = texts.get(name, item.extras.get(name))
        if isinstance(text, str) and text.strip():
            fields[name] = embedder(text, mode, dims)
    return FieldEmbeddingSet(item_id=item.item_id, source=item.source,
                             fields=fields)


def _feature_matrix(records, embedder, mode, dims, spec):
    rows = []
    intent_cache = {}
    for record in records:
        key = record.intent.id
        if key not in intent_cache:
            intent_cache[key] = embedder(record.intent.prompt, mode, dims)
        field_embs = _embed_record_fields(embedder, record, mode, dims)
        rows.append(build_features(intent_cache[key], field_embs, spec))
    return rows


def run_study(datasets, embedder, modes, dims_list, specs, kinds, seed,
              grids=None, folds=None) -> StudyResult:
    """Evaluate the full cross-product and pick the per-(source, mode) best.

    `embedder(text, model_id, dims) -> EmbeddingVector` supplies all
    embeddings; everything downstream is deterministic given (data, seed).
    Selection maximizes balanced accuracy, ties broken by higher F1 and then
    enumeration order.
    """
    grids = grids or {}
    matrix = []
    selections = {}
    for source in source_defs.ordered(datasets):
        ds = datasets[source]
        train_ds, test_ds = split_dataset(ds, seed)
        for mode in modes:
            for dims in dims_list:
                for spec in specs:
                    spec = spec if isinstance(spec, FeatureSpec) else FeatureSpec(spec)
                    X_train = _feature_matrix(train_ds.records, embedder, mode,
                                              dims, spec)
                    X_test = _feature_matrix(test_ds.records, embedder, mode,
                                             dims, spec)
                    y_train = train_ds.labels()
                    y_test = test_ds.labels()
                    Xtr = np.vstack([fv.values for fv in X_train])
                    for kind in kinds:
                        grid = grids.get(kind) or GridSpec(
                            kind=kind, **({"folds": folds} if folds else {})
                        )
                        try:
                            best_params, cv = grid_search(Xtr, y_train, grid, seed)
                            model = fit_model(kind, X_train, y_train,
                                              best_params, source=source)
                            preds = [predict(model, fv).label for fv in X_test]
                        except GreylitError as exc:
                            raise type(exc)(
                                f"{exc} [configuration: {source}/{mode}/"
                                f"{dims}/{spec.kind}/{kind}]"
                            ) from exc
                        metrics = compute_metrics(y_test, preds)
                        report = EvalReport(
                            metrics=metrics,
                            config={
                                "source": source,
                                "embedding_model_id": mode,
                                "dims": dims,
                                "spec": spec.kind,
                                "kind": kind,
                                "hyperparams": best_params,
                                "cv_score": cv,
                            },
                        )
                        matrix.append(report)
                        key = (source, mode)
                        incumbent = selections.get(key)
                        if incumbent is None or _beats(report, incumbent):
                            selections[key] = report
    return StudyResult(matrix=matrix, selections=selections)


def _beats(challenger: EvalReport, incumbent: EvalReport) -> bool:
    a = (challenger.metrics.balanced_accuracy, challenger.metrics.f1)
    b = (incumbent.metrics.balanced_accuracy, incumbent.metrics.f1)
    return a > b
