"""End-to-end keyword extraction: extract, embed, adapt per mode, rank"""

from __future__ import annotations

from dataclasses import dataclass, field

from .adaptation.few_shot import AdapterWeights, adapter_forward
from .adaptation.zero_shot import SeedSet, reweight_candidates
from .constants import (
    DEFAULT_DIVERSITY,
    DEFAULT_TOP_K,
    FEW_SHOT_MODES,
    MODE_BENCHMARK,
    MODES,
    ZERO_SHOT_MODES,
)
from .embeddings.backends import Embedder
from .embeddings.vectors import EmbeddingVector
from .exceptions import ValidationError
from .extraction.candidates import CandidateSet, Document, NgramRange, extract_candidates
from .handlers import throw
from .ranking.ranker import ScoredKeyword, mmr_diversify, score_candidates, top_k


@dataclass(frozen=True)
class ExtractionConfig:
    ngram_range: NgramRange = field(default_factory=NgramRange)
    stopwords: frozenset[str] = frozenset()


@dataclass(frozen=True)
class PipelineConfig:
    mode: str = MODE_BENCHMARK
    adapter: AdapterWeights | None = None
    seeds: SeedSet | None = None
    top_k: int = DEFAULT_TOP_K
    diversity: float = DEFAULT_DIVERSITY
    extraction: ExtractionConfig = field(default_factory=ExtractionConfig)

    def __post_init__(self) -> None:
        error_title = "Pipeline Setup Error"

        if self.mode not in MODES:
            throw(
                f"Unknown mode {self.mode!r}; expected one of {', '.join(MODES)}",
                title=error_title,
            )

        if self.mode in FEW_SHOT_MODES and self.adapter is None:
            throw(f"Mode {self.mode} needs adapter weights (--adapter)", title=error_title)

        if self.mode in ZERO_SHOT_MODES and self.seeds is None:
            throw(
                f"Mode {self.mode} needs seed words (--seed-words or --seed-words-file)",
                title=error_title,
            )

        if self.top_k < 1:
            throw(f"--top-k must be at least 1, got {self.top_k}", title=error_title)

        if not 0.0 <= self.diversity <= 1.0:
            throw(
                f"--diversity must lie in [0, 1], got {self.diversity}",
                title=error_title,
            )

    @property
    def alpha(self) -> float | None:
        return self.seeds.alpha if self.seeds is not None else None


def embed_document(
    doc: Document, candidates: CandidateSet, embedder: Embedder
) -> tuple[EmbeddingVector, list[EmbeddingVector]]:
    """Embeds the whole document text and every candidate phrase

    Args:
        doc (Document): The document
        candidates (CandidateSet): Its candidates
        embedder (Embedder): The embedding backend

    Returns:
        tuple[EmbeddingVector, list[EmbeddingVector]]: E_D and E_C in candidate order
    """
    return embedder.embed_one(doc.text), embedder.embed(candidates.surfaces)


def adapt_candidates(
    E_D: EmbeddingVector, E_C: list[EmbeddingVector], config: PipelineConfig
) -> list[EmbeddingVector]:
    """Recomputes candidate embeddings for the configured mode.

    The combined mode runs the adapter first and then blends its output
    toward E_D, weighting by seed similarity of the original embeddings.
    """
    adapted = E_C

    if config.mode in FEW_SHOT_MODES:
        config.adapter.validate_dimension(E_D.shape[0])
        adapted = adapter_forward(config.adapter, E_D, E_C)

    if config.mode in ZERO_SHOT_MODES:
        adapted = reweight_candidates(adapted, E_C, E_D, config.seeds)

    return adapted


def rank_candidates(
    doc: Document,
    candidates: CandidateSet,
    embedder: Embedder,
    config: PipelineConfig,
) -> list[ScoredKeyword]:
    if not len(candidates):
        throw(f"Document {doc.id!r} has no candidates to rank", ValidationError)

    E_D, E_C = embed_document(doc, candidates, embedder)
    adapted = adapt_candidates(E_D, E_C, config)

    if config.diversity > 0:
        return mmr_diversify(
            E_D, adapted, candidates.surfaces, config.top_k, config.diversity
        )

    return top_k(score_candidates(E_D, adapted, candidates.surfaces), config.top_k)


def extract_keywords(
    doc: Document, embedder: Embedder, config: PipelineConfig
) -> list[ScoredKeyword]:
    """Extracts the top keywords of one document

    Args:
        doc (Document): The document
        embedder (Embedder): The embedding backend
        config (PipelineConfig): Mode, adaptation inputs and ranking settings

    Returns:
        list[ScoredKeyword]: At most top_k keywords, best first
    """
    candidates = extract_candidates(
        doc, config.extraction.ngram_range, config.extraction.stopwords
    )

    return rank_candidates(doc, candidates, embedder, config)
