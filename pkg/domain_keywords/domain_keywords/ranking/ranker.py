"""Cosine ranking of candidate embeddings against the document embedding"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..embeddings.vectors import EmbeddingVector, cosine_matrix
from ..exceptions import DimensionMismatch, ValidationError
from ..handlers import throw


@dataclass(frozen=True)
class ScoredKeyword:
    phrase: str
    score: float


def _ranking_key(keyword: ScoredKeyword) -> tuple[float, str]:
    return -keyword.score, keyword.phrase


def _relevance(
    E_D: EmbeddingVector, adapted: list[EmbeddingVector], phrases: list[str]
) -> np.ndarray:
    if not phrases:
        throw("Nothing to rank: the candidate list is empty", ValidationError)

    if len(adapted) != len(phrases):
        throw(
            f"{len(adapted)} embeddings for {len(phrases)} phrases",
            DimensionMismatch,
        )

    if len(set(phrases)) != len(phrases):
        throw("Ranked phrases must be unique", ValidationError)

    return cosine_matrix(np.asarray(adapted, dtype=np.float64), E_D)


def score_candidates(
    E_D: EmbeddingVector, adapted: list[EmbeddingVector], phrases: list[str]
) -> list[ScoredKeyword]:
    """Scores every candidate by cosine similarity to the document

    Args:
        E_D (EmbeddingVector): The document embedding
        adapted (list[EmbeddingVector]): Candidate embeddings, adapted or not
        phrases (list[str]): The candidate phrases, aligned with adapted

    Returns:
        list[ScoredKeyword]: Descending by score, ties by ascending phrase
    """
    scores = _relevance(E_D, adapted, phrases)
    scored = [
        ScoredKeyword(phrase=phrase, score=float(score))
        for phrase, score in zip(phrases, scores)
    ]

    return sorted(scored, key=_ranking_key)


def top_k(scored: list[ScoredKeyword], k: int) -> list[ScoredKeyword]:
    if k < 1:
        throw(f"--top-k must be at least 1, got {k}", ValidationError)

    return scored[:k]


def mmr_diversify(
    E_D: EmbeddingVector,
    adapted: list[EmbeddingVector],
    phrases: list[str],
    k: int,
    diversity: float,
) -> list[ScoredKeyword]:
    """Greedy maximal marginal relevance selection.

    Each step picks the candidate maximising
    (1 - diversity) * cos(a_c, E_D) - diversity * max_s cos(a_c, a_s)
    over the already selected s; the first pick is the plain best match.
    Reported scores are the plain cosines to E_D.

    Args:
        E_D (EmbeddingVector): The document embedding
        adapted (list[EmbeddingVector]): Candidate embeddings
        phrases (list[str]): The candidate phrases
        k (int): How many keywords to select
        diversity (float): 0 ranks purely by relevance, 1 purely by novelty

    Returns:
        list[ScoredKeyword]: The selected keywords in selection order
    """
    if not 0.0 <= diversity <= 1.0:
        throw(f"--diversity must lie in [0, 1], got {diversity}", ValidationError)

    if k < 1:
        throw(f"--top-k must be at least 1, got {k}", ValidationError)

    relevance = _relevance(E_D, adapted, phrases)
    vectors = np.asarray(adapted, dtype=np.float64)
    unit = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
    similarity = np.clip(unit @ unit.T, -1.0, 1.0)

    remaining = list(range(len(phrases)))
    selected: list[int] = []

    while remaining and len(selected) < k:
        if selected:
            redundancy = similarity[np.ix_(remaining, selected)].max(axis=1)
            objective = (1.0 - diversity) * relevance[remaining] - diversity * redundancy
        else:
            objective = relevance[remaining]

        best = min(
            range(len(remaining)),
            key=lambda position: (-objective[position], phrases[remaining[position]]),
        )
        selected.append(remaining.pop(best))

    return [
        ScoredKeyword(phrase=phrases[index], score=float(relevance[index]))
        for index in selected
    ]
