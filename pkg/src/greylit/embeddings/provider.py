"""Embedding providers, the text-embedding entry point, and its cache."""

from __future__ import annotations

import hashlib
import json
import os
import threading

import numpy as np

from greylit.embeddings.vectors import EmbeddingVector
from greylit.errors import EmbeddingError, InvalidInputError
from greylit.sources import VALID_EMBEDDING_DIMS

CACHE_FORMAT_VERSION = 1
MAX_EMBED_CHARS = 8000  # provider token-limit guard; longer text is truncated


def _text_key(text: str, model_id: str, dims: int) -> str:
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return f"{digest}:{model_id}:{dims}"


class EmbeddingCache:
    """Thread-safe embedding cache, optionally persisted append-only.

    Concurrent identical requests are coalesced to one provider call via a
    per-key lock. The persistence file is one JSON record per line, keyed by
    (text hash, model_id, dims).
    """

    def __init__(self, path=None):
        self.path = path
        self._data = {}
        self._lock = threading.Lock()
        self._key_locks = {}
        if path and os.path.exists(path):
            self._load(path)

    def _load(self, path):
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    continue  # incomplete trailing record
                if rec.get("v") == CACHE_FORMAT_VERSION:
                    self._data[rec["key"]] = np.array(rec["values"], dtype=np.float64)

    def _persist(self, key, values, model_id, dims):
        if not self.path:
            return
        rec = {
            "v": CACHE_FORMAT_VERSION,
            "key": key,
            "model_id": model_id,
            "dims": dims,
            "values": values.tolist(),
        }
        with open(self.path, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(rec) + "\n")
            handle.flush()

    def get_or_compute(self, key, compute, model_id, dims):
        with self._lock:
            if key in self._data:
                return self._data[key]
            key_lock = self._key_locks.setdefault(key, threading.Lock())
        with key_lock:
            with self._lock:
                if key in self._data:
                    return self._data[key]
            values = compute()
            with self._lock:
                self._data[key] = values
            self._persist(key, values, model_id, dims)
            return values


class HashEmbeddingProvider:
    """Deterministic offline provider: a pseudo-random unit-sphere direction
    seeded by the text. Useful for fixtures and fully reproducible runs."""

    def __init__(self, native_dims=1536):
        self.native_dims = native_dims
        self.request_count = 0

    def embed(self, text, model_id, dims):
        self.request_count += 1
        seed = int.from_bytes(
            hashlib.sha256(f"{model_id}:{text}".encode("utf-8")).digest()[:8], "big"
        )
        rng = np.random.default_rng(seed)
        return rng.standard_normal(self.native_dims)


class OpenAIEmbeddingProvider:
    """Live provider speaking the OpenAI embeddings HTTP API."""

    def __init__(self, api_key=None, base_url="https://api.openai.com/v1"):
        self.api_key = api_key or os.environ.get("GREYLIT_API_KEY")
        self.base_url = base_url.rstrip("/")

    def embed(self, text, model_id, dims):
        import requests

        if not self.api_key:
            raise EmbeddingError("no API key configured (GREYLIT_API_KEY)")
        resp = requests.post(
            f"{self.base_url}/embeddings",
            headers={"Authorization": f"Bearer {self.api_key}"},
            json={"model": model_id, "input": text, "dimensions": dims},
            timeout=60,
        )
        if resp.status_code != 200:
            raise EmbeddingError(f"embedding request failed: {resp.status_code}")
        return resp.json()["data"][0]["embedding"]


def embed_text(provider, text, model_id, dims, cache=None) -> EmbeddingVector:
    """Embed text at the requested dimensionality, normalized to unit norm.

    If the provider returns a longer vector (no native support for `dims`),
    the first `dims` entries are kept and the result renormalized. Repeated
    calls for the same (text, model, dims) are served from the cache.
    """
    if dims not in VALID_EMBEDDING_DIMS:
        raise InvalidInputError(f"dims must be one of {VALID_EMBEDDING_DIMS}")
    if not text or not text.strip():
        raise InvalidInputError("cannot embed empty text")
    text = text[:MAX_EMBED_CHARS]

    def compute():
        raw = np.asarray(provider.embed(text, model_id, dims), dtype=np.float64)
        if raw.ndim != 1 or raw.shape[0] < dims:
            raise EmbeddingError(
                f"provider returned {raw.shape} vector, need at least {dims}"
            )
        vec = raw[:dims]
        norm = np.linalg.norm(vec)
        if norm == 0.0 or not np.all(np.isfinite(vec)):
            raise EmbeddingError("provider returned a degenerate vector")
        return vec / norm

    if cache is None:
        values = compute()
    else:
        values = cache.get_or_compute(_text_key(text, model_id, dims), compute,
                                      model_id, dims)
    return EmbeddingVector(values=values, model_id=model_id, normalized=True)
