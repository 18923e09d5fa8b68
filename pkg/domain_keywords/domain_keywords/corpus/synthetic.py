"""Generated labeled corpora and embedding stores for exercising domain adaptation end to end.

Each document mixes a few domain terms (its gold keywords, used once each)
with filler words repeated several times. The matching embedding store puts
every domain term off to one side of the documents, so unadapted cosine
ranking favours the fillers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..embeddings.vectors import EmbeddingVector
from ..extraction.candidates import Document, load_stopwords, normalize_phrase, tokenize
from ..handlers import throw
from .protocol import CorpusEntry, LabeledCorpus

DOMAIN_TERMS = (
    "aquaculture",
    "fishery",
    "irrigation",
    "livestock",
    "fertilizer",
    "agronomy",
    "pesticide",
    "silviculture",
)
CONSONANTS = "bcdfghjklmnprstvz"
VOWELS = "aeiou"


@dataclass(frozen=True)
class SyntheticCorpusConfig:
    documents: int = 60
    domain_terms_per_document: int = 3
    fillers_per_document: int = 12
    filler_repeats: int = 4
    filler_pool_size: int = 200
    seed: int = 0

    def __post_init__(self) -> None:
        error_title = "Synthetic Corpus Error"

        if self.documents < 1:
            throw("At least one document is required", title=error_title)

        if not 1 <= self.domain_terms_per_document <= len(DOMAIN_TERMS):
            throw(
                f"Documents can hold 1 to {len(DOMAIN_TERMS)} domain terms",
                title=error_title,
            )

        if not 1 <= self.fillers_per_document <= self.filler_pool_size:
            throw("Fillers per document must fit in the filler pool", title=error_title)

        if self.filler_repeats < 1:
            throw("Filler words must appear at least once", title=error_title)


def filler_words(count: int, rng: np.random.Generator) -> list[str]:
    """Distinct pronounceable nonsense words, none a stopword or a domain term"""
    excluded = load_stopwords() | frozenset(DOMAIN_TERMS)
    words: dict[str, None] = {}

    while len(words) < count:
        word = "".join(
            CONSONANTS[rng.integers(len(CONSONANTS))] + VOWELS[rng.integers(len(VOWELS))]
            for _ in range(3)
        )

        if word not in excluded:
            words[word] = None

    return list(words)


def generate_corpus(cfg: SyntheticCorpusConfig | None = None) -> LabeledCorpus:
    """Builds a seeded synthetic corpus

    Args:
        cfg (SyntheticCorpusConfig | None, optional): Corpus shape. Defaults to
            SyntheticCorpusConfig().

    Returns:
        LabeledCorpus: Documents `doc-000`, `doc-001`, ... in id order
    """
    cfg = cfg or SyntheticCorpusConfig()
    rng = np.random.default_rng(cfg.seed)
    pool = filler_words(cfg.filler_pool_size, rng)
    entries = []

    for number in range(cfg.documents):
        terms = [
            DOMAIN_TERMS[index]
            for index in rng.choice(
                len(DOMAIN_TERMS), cfg.domain_terms_per_document, replace=False
            )
        ]
        fillers = [
            pool[index]
            for index in rng.choice(len(pool), cfg.fillers_per_document, replace=False)
        ]
        tokens = terms + fillers * cfg.filler_repeats
        order = rng.permutation(len(tokens))

        document = Document(
            id=f"doc-{number:03d}",
            text=" ".join(tokens[index] for index in order),
        )
        entries.append(CorpusEntry(document=document, gold_keywords=frozenset(terms)))

    return LabeledCorpus(entries=tuple(entries), name="synthetic")


def write_corpus(corpus: LabeledCorpus, path: str | Path) -> None:
    """Writes a corpus in the JSON Lines format load_corpus reads"""
    lines = (
        json.dumps(
            {
                "id": entry.document.id,
                "text": entry.document.text,
                "keywords": sorted(entry.gold_keywords),
            }
        )
        for entry in corpus.entries
    )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class SyntheticStoreConfig:
    """Geometry of a generated embedding store.

    Axis 0 is a bias every vector carries with weight `bias`. Axis 1 is the
    domain offset, carried only by domain terms. The next len(DOMAIN_TERMS)
    axes are one topic per domain term, and fillers take random unit
    directions in the remaining axes. A document is the bias plus
    `topic_weight` times the topic axes of its gold terms.
    """

    dimension: int = 16
    bias: float = 6.0
    domain_offset: float = 1.5
    topic_weight: float = 0.8
    seed: int = 0

    def __post_init__(self) -> None:
        error_title = "Synthetic Store Error"

        if self.dimension < len(DOMAIN_TERMS) + 3:
            throw(
                f"The store needs at least {len(DOMAIN_TERMS) + 3} dimensions, got {self.dimension}",
                title=error_title,
            )

        if not self.bias > 0:
            throw(f"The bias weight must be positive, got {self.bias}", title=error_title)

        if self.domain_offset < 0 or self.topic_weight < 0:
            throw("Domain offset and topic weight must be non-negative", title=error_title)

    @property
    def filler_axes(self) -> slice:
        return slice(2 + len(DOMAIN_TERMS), self.dimension)


def generate_embedding_store(
    corpus: LabeledCorpus, cfg: SyntheticStoreConfig | None = None
) -> dict[str, EmbeddingVector]:
    """Embeds every document and token of a synthetic corpus

    Args:
        corpus (LabeledCorpus): A corpus from generate_corpus
        cfg (SyntheticStoreConfig | None, optional): Store geometry. Defaults to
            SyntheticStoreConfig().

    Returns:
        dict[str, EmbeddingVector]: Normalized text to vector, domain terms
            first, then fillers in sorted order, then documents in corpus order
    """
    cfg = cfg or SyntheticStoreConfig()
    rng = np.random.default_rng(cfg.seed)
    topics = {term: 2 + index for index, term in enumerate(DOMAIN_TERMS)}
    store: dict[str, EmbeddingVector] = {}

    def based() -> EmbeddingVector:
        vector = np.zeros(cfg.dimension)
        vector[0] = cfg.bias
        return vector

    for term, axis in topics.items():
        vector = based()
        vector[1] = cfg.domain_offset
        vector[axis] = 1.0
        store[term] = vector

    tokens = {token for entry in corpus.entries for token in tokenize(entry.document.text)}

    for token in sorted(tokens - store.keys()):
        direction = rng.standard_normal(cfg.filler_axes.stop - cfg.filler_axes.start)
        vector = based()
        vector[cfg.filler_axes] = direction / np.linalg.norm(direction)
        store[token] = vector

    for entry in corpus.entries:
        vector = based()

        for term in entry.gold_keywords:
            if term not in topics:
                throw(f"{term!r} is not a synthetic domain term", title="Synthetic Store Error")

            vector[topics[term]] += cfg.topic_weight

        store[normalize_phrase(entry.document.text)] = vector

    return store


def write_embedding_store(store: dict[str, EmbeddingVector], path: str | Path) -> None:
    """Writes a store in the JSON Lines format load_precomputed_store reads"""
    lines = (
        json.dumps({"text": text, "vector": vector.tolist()}) for text, vector in store.items()
    )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
