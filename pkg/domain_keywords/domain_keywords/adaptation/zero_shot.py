"""Zero-shot reweighting toward the document using domain seed phrases"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..constants import DEFAULT_ALPHA
from ..embeddings.backends import Embedder
from ..embeddings.vectors import EmbeddingVector, cosine_similarity
from ..exceptions import DimensionMismatch, EmptySeedSet, ValidationError
from ..extraction.candidates import normalize_phrase
from ..handlers import throw
from ..utils import read_lines_file


def validate_unit_interval(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        throw(f"{name} must lie in [0, 1], got {value}", ValidationError)


@dataclass(frozen=True)
class SeedSet:
    phrases: tuple[str, ...]
    embeddings: tuple[EmbeddingVector, ...]
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self) -> None:
        if not self.phrases:
            throw("The seed set is empty", EmptySeedSet)

        if len(self.phrases) != len(self.embeddings):
            throw(
                f"{len(self.phrases)} seed phrases but {len(self.embeddings)} embeddings",
                DimensionMismatch,
            )

        validate_unit_interval("--alpha", self.alpha)


def build_seed_set(
    phrases: list[str], embedder: Embedder, alpha: float = DEFAULT_ALPHA
) -> SeedSet:
    """Normalizes, deduplicates (first occurrence wins) and embeds seed phrases

    Args:
        phrases (list[str]): Raw seed phrases
        embedder (Embedder): The embedding backend
        alpha (float, optional): The regularizer α. Defaults to DEFAULT_ALPHA.

    Returns:
        SeedSet: The embedded seeds
    """
    validate_unit_interval("--alpha", alpha)
    normalized = list(dict.fromkeys(normalize_phrase(phrase) for phrase in phrases))
    normalized = [phrase for phrase in normalized if phrase]

    if not normalized:
        throw("No usable seed words were given", EmptySeedSet)

    return SeedSet(
        phrases=tuple(normalized),
        embeddings=tuple(embedder.embed(normalized)),
        alpha=alpha,
    )


def load_seed_words(path: str | Path) -> list[str]:
    """Reads seed phrases, one per line"""
    return read_lines_file(path)


def seed_similarity_weights(
    candidates: list[EmbeddingVector], seeds: SeedSet
) -> list[float]:
    """Similarity-weight per candidate: its best cosine to any seed, floored at 0

    Args:
        candidates (list[EmbeddingVector]): Candidate embeddings e_c
        seeds (SeedSet): The seed phrases and embeddings

    Returns:
        list[float]: sw in [0, 1], in candidate order
    """
    return [
        max(0.0, max(cosine_similarity(e_c, e_s) for e_s in seeds.embeddings))
        for e_c in candidates
    ]


def blend(
    e_c: EmbeddingVector, E_D: EmbeddingVector, sw: float, alpha: float
) -> EmbeddingVector:
    """a_c = (1 − sw·α)·e_c + (sw·α)·E_D, componentwise

    Args:
        e_c (EmbeddingVector): The candidate embedding
        E_D (EmbeddingVector): The document embedding
        sw (float): Similarity-weight in [0, 1]
        alpha (float): Regularizer in [0, 1]

    Returns:
        EmbeddingVector: The blended embedding
    """
    if e_c.shape != E_D.shape:
        throw(
            f"Cannot blend vectors of shape {e_c.shape} and {E_D.shape}",
            DimensionMismatch,
        )

    validate_unit_interval("similarity-weight", sw)
    validate_unit_interval("alpha", alpha)

    weight = sw * alpha

    return (1.0 - weight) * e_c + weight * E_D


def reweight_candidates(
    adapted: list[EmbeddingVector],
    original: list[EmbeddingVector],
    E_D: EmbeddingVector,
    seeds: SeedSet,
) -> list[EmbeddingVector]:
    """Blends (possibly adapter-recomputed) candidates toward E_D.

    Similarity-weights are always computed from the original embeddings.
    """
    weights = seed_similarity_weights(original, seeds)

    return [
        blend(a_c, E_D, sw, seeds.alpha) for a_c, sw in zip(adapted, weights)
    ]

