from greylit.embeddings.vectors import (
    EmbeddingVector,
    cosine_distance,
    euclidean_distance,
    l1_distance,
)
from greylit.embeddings.provider import EmbeddingCache, HashEmbeddingProvider, embed_text
from greylit.embeddings.features import (
    FEATURE_KINDS,
    FeatureSpec,
    FeatureVector,
    FieldEmbeddingSet,
    build_features,
    feature_width,
)

__all__ = [
    "EmbeddingVector",
    "cosine_distance",
    "euclidean_distance",
    "l1_distance",
    "EmbeddingCache",
    "HashEmbeddingProvider",
    "embed_text",
    "FEATURE_KINDS",
    "FeatureSpec",
    "FeatureVector",
    "FieldEmbeddingSet",
    "build_features",
    "feature_width",
]
