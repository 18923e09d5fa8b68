"""Vector math shared by every stage, and the deterministic hashing embedder"""

from __future__ import annotations

import hashlib
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from ..exceptions import DimensionMismatch, ValidationError, ZeroVector
from ..extraction.candidates import normalize_phrase, tokenize
from ..handlers import throw

EmbeddingVector = NDArray[np.float64]


def as_vector(values, d: int | None = None) -> EmbeddingVector:
    """Coerces values to a finite 1-D float64 vector, optionally of dimension d"""
    try:
        vector = np.asarray(values, dtype=np.float64)

    except (TypeError, ValueError):
        throw("Embedding vector values must be numbers", ValidationError)

    if vector.ndim != 1 or (d is not None and vector.shape[0] != d):
        throw(
            f"Expected a vector of dimension {d}, got shape {vector.shape}",
            DimensionMismatch,
        )

    if not np.all(np.isfinite(vector)):
        throw("Embedding vector has non-finite entries", ValidationError)

    return vector


def cosine_similarity(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1]

    Args:
        u (EmbeddingVector): First vector
        v (EmbeddingVector): Second vector, same dimension

    Returns:
        float: u·v / (‖u‖ ‖v‖)
    """
    if u.shape != v.shape:
        throw(f"Cannot compare vectors of shape {u.shape} and {v.shape}", DimensionMismatch)

    norm_u, norm_v = np.linalg.norm(u), np.linalg.norm(v)

    if norm_u == 0 or norm_v == 0:
        throw("Cosine similarity is undefined for a zero vector", ZeroVector)

    return float(np.clip(np.dot(u, v) / (norm_u * norm_v), -1.0, 1.0))


def cosine_matrix(rows: NDArray[np.float64], target: EmbeddingVector) -> NDArray[np.float64]:
    """Cosine of every row against one target vector"""
    if rows.ndim != 2 or rows.shape[1] != target.shape[0]:
        throw(
            f"Cannot compare rows of shape {rows.shape} with a vector of shape {target.shape}",
            DimensionMismatch,
        )

    row_norms = np.linalg.norm(rows, axis=1)
    target_norm = np.linalg.norm(target)

    if target_norm == 0 or np.any(row_norms == 0):
        throw("Cosine similarity is undefined for a zero vector", ZeroVector)

    return np.clip(rows @ target / (row_norms * target_norm), -1.0, 1.0)


def _seeded_hash(feature: str, seed: int) -> int:
    key = seed.to_bytes(8, "little", signed=True)
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8, key=key).digest()
    return int.from_bytes(digest, "little", signed=False)


def _add_feature(vector: EmbeddingVector, feature: str, d: int, seed: int) -> None:
    value = _seeded_hash(feature, seed)
    sign = 1.0 if (value >> 63) & 1 else -1.0
    vector[value % d] += sign


@lru_cache(maxsize=65_536)
def _word_vector(word: str, d: int, seed: int) -> EmbeddingVector:
    padded = f"<{word}>"
    vector = np.zeros(d, dtype=np.float64)

    for start in range(len(padded) - 2):
        _add_feature(vector, padded[start : start + 3], d, seed)

    # signed collisions can cancel out every trigram
    if not np.any(vector):
        _add_feature(vector, padded, d, seed)

    vector /= np.linalg.norm(vector)
    vector.setflags(write=False)

    return vector


def hash_embed(text: str, d: int, seed: int) -> EmbeddingVector:
    """Deterministic stand-in for a sentence embedding model.

    Each word's padded character trigrams are hashed (seeded blake2b, 64 bit)
    into d signed buckets and the word vector is L2-normalized; a text embeds
    as the L2-normalized mean of its word vectors, repeats included.

    Args:
        text (str): The text to embed
        d (int): The dimension
        seed (int): The hash seed

    Returns:
        EmbeddingVector: A unit vector of dimension d
    """
    if d <= 0:
        throw(f"Embedding dimension must be positive, got {d}", ValidationError)

    words = tokenize(text) or normalize_phrase(text).split()

    if not words:
        throw("Cannot embed an empty text", ValidationError)

    mean = np.mean([_word_vector(word, d, seed) for word in words], axis=0)
    norm = np.linalg.norm(mean)

    if norm == 0:
        throw(f"Text {text[:40]!r} hashed to a zero vector", ZeroVector)

    return mean / norm
