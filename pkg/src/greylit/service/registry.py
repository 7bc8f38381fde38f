"""Deployment registry of trained classifiers keyed by (source, embedding mode)."""

from __future__ import annotations

import os

from greylit.errors import NotFoundError
from greylit.models.serialize import model_from_json, model_to_json


class ModelRegistry:
    def __init__(self):
        self._models = {}

    def register(self, source, embedding_model_id, model):
        self._models[(source, embedding_model_id)] = model

    def get(self, source, embedding_model_id):
        try:
            return self._models[(source, embedding_model_id)]
        except KeyError:
            raise NotFoundError(
                f"no model registered for ({source}, {embedding_model_id})"
            )

    def has(self, source, embedding_model_id):
        return (source, embedding_model_id) in self._models

    @classmethod
    def from_directory(cls, path):
        """Load serialized models named `<source>__<embedding_model_id>.json`."""
        registry = cls()
        for name in sorted(os.listdir(path)):
            if not name.endswith(".json") or "__" not in name:
                continue
            source, mode = name[: -len(".json")].split("__", 1)
            with open(os.path.join(path, name), encoding="utf-8") as handle:
                registry.register(source, mode, model_from_json(handle.read()))
        return registry

    def save_to_directory(self, path):
        os.makedirs(path, exist_ok=True)
        for (source, mode), model in self._models.items():
            filename = os.path.join(path, f"{source}__{mode}.json")
            with open(filename, "w", encoding="utf-8") as handle:
                handle.write(model_to_json(model))
