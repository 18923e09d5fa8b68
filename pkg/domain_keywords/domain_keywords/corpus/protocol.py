"""Labeled corpus ingestion and the popular-keyword protocol used to pick
few-shot training documents and zero-shot seed words."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from ..adaptation.few_shot import TrainingPair
from ..constants import DEFAULT_P
from ..exceptions import (
    DuplicateDocumentId,
    EmptyCorpus,
    EmptySeedSet,
    ParseError,
    ValidationError,
)
from ..extraction.candidates import Document, normalize_phrase
from ..handlers import throw
from ..logger import keyword_logger
from ..utils import ceil_fraction, fraction_of


@dataclass(frozen=True)
class CorpusEntry:
    document: Document
    gold_keywords: frozenset[str]


@dataclass(frozen=True)
class LabeledCorpus:
    entries: tuple[CorpusEntry, ...]
    name: str = "corpus"

    def __post_init__(self) -> None:
        if not self.entries:
            throw(f"Corpus {self.name!r} has no documents", EmptyCorpus)

        seen: set[str] = set()
        for entry in self.entries:
            if entry.document.id in seen:
                throw(
                    f"Document id {entry.document.id!r} appears twice in {self.name!r}",
                    DuplicateDocumentId,
                )

            if not entry.gold_keywords:
                throw(
                    f"Document {entry.document.id!r} has no gold keywords",
                    ValidationError,
                )

            seen.add(entry.document.id)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def ids(self) -> list[str]:
        return [entry.document.id for entry in self.entries]


@dataclass(frozen=True)
class ProtocolConfig:
    p: float = DEFAULT_P

    def __post_init__(self) -> None:
        if not 0.0 < self.p < 1.0:
            throw(f"--p must lie strictly between 0 and 1, got {self.p}", ValidationError)


def _parse_entry(line: str, location: str) -> CorpusEntry:
    try:
        row = json.loads(line)

    except json.JSONDecodeError as error:
        throw(f"{location}: invalid JSON ({error.msg})", ParseError)

    if not isinstance(row, dict):
        throw(f"{location}: expected a JSON object", ParseError)

    for key in ("id", "text", "keywords"):
        if key not in row:
            throw(f"{location}: missing field {key!r}", ParseError)

    document_id, text, keywords = row["id"], row["text"], row["keywords"]

    if not isinstance(document_id, str) or not isinstance(text, str):
        throw(f"{location}: 'id' and 'text' must be strings", ParseError)

    if not isinstance(keywords, list) or not all(isinstance(k, str) for k in keywords):
        throw(f"{location}: 'keywords' must be a list of strings", ParseError)

    gold = frozenset(normalize_phrase(keyword) for keyword in keywords) - {""}

    if not gold:
        throw(f"{location}: document {document_id!r} has no usable keywords", ParseError)

    try:
        document = Document(id=document_id, text=text)

    except ValidationError as error:
        throw(f"{location}: {error.message}", ParseError)

    return CorpusEntry(document=document, gold_keywords=gold)


def load_corpus(path: str | Path) -> LabeledCorpus:
    """Loads a JSON Lines corpus of `{"id", "text", "keywords"}` objects

    Args:
        path (str | Path): The corpus file

    Returns:
        LabeledCorpus: Entries in file order, gold keywords normalized
    """
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()

    except (OSError, UnicodeDecodeError) as error:
        throw(f"Could not read corpus {path}: {error}", ParseError)

    entries = [
        _parse_entry(line, f"{path}:{line_number}")
        for line_number, line in enumerate(lines, start=1)
        if line.strip()
    ]

    if not entries:
        throw(f"Corpus {path} has no documents", EmptyCorpus)

    return LabeledCorpus(entries=tuple(entries), name=Path(path).stem)


def document_frequencies(corpus: LabeledCorpus) -> Counter[str]:
    return Counter(
        keyword for entry in corpus.entries for keyword in entry.gold_keywords
    )


def popular_keywords_with_frequency(
    corpus: LabeledCorpus, cfg: ProtocolConfig
) -> list[tuple[str, int]]:
    """Gold keywords present in strictly more than p·N documents, with their counts

    Args:
        corpus (LabeledCorpus): The corpus
        cfg (ProtocolConfig): The threshold p

    Returns:
        list[tuple[str, int]]: (keyword, document frequency), most frequent
            first, ties in ascending keyword order
    """
    threshold = fraction_of(cfg.p, len(corpus))
    popular = [
        (keyword, frequency)
        for keyword, frequency in document_frequencies(corpus).items()
        if frequency > threshold
    ]

    return sorted(popular, key=lambda item: (-item[1], item[0]))


def popular_keywords(corpus: LabeledCorpus, cfg: ProtocolConfig) -> list[str]:
    return [keyword for keyword, _ in popular_keywords_with_frequency(corpus, cfg)]


def select_fewshot_documents(
    corpus: LabeledCorpus, popular: list[str], cfg: ProtocolConfig
) -> list[TrainingPair]:
    """Picks the ⌈p·N⌉ documents whose gold sets cover the most popular keywords.

    Documents rank by the number of popular keywords in their gold set,
    ties by ascending id; with no popular keywords this is plain id order.
    Each pick trains on its full gold set.

    Args:
        corpus (LabeledCorpus): The corpus
        popular (list[str]): The popular keywords
        cfg (ProtocolConfig): The cap p

    Returns:
        list[TrainingPair]: The training pairs in selection order
    """
    popular_set = frozenset(popular)
    ranked = sorted(
        corpus.entries,
        key=lambda entry: (
            -len(entry.gold_keywords & popular_set),
            entry.document.id,
        ),
    )
    selected = ranked[: ceil_fraction(cfg.p, len(corpus))]

    keyword_logger.info(
        "Selected %s of %s documents for few-shot training",
        len(selected),
        len(corpus),
    )

    return [
        TrainingPair(document=entry.document, relevant_phrases=entry.gold_keywords)
        for entry in selected
    ]


def auto_seed_words(corpus: LabeledCorpus, cfg: ProtocolConfig) -> list[str]:
    """The popular keywords, used verbatim as zero-shot seed words"""
    seeds = popular_keywords(corpus, cfg)

    if not seeds:
        throw(
            f"No gold keyword occurs in more than {cfg.p:.0%} of {len(corpus)} documents",
            EmptySeedSet,
        )

    return seeds


def split_corpus(
    corpus: LabeledCorpus, selected_ids: list[str], eval_on_train: bool = False
) -> LabeledCorpus:
    """The evaluation split: every document not used for few-shot training

    Args:
        corpus (LabeledCorpus): The full corpus
        selected_ids (list[str]): Ids of the training documents
        eval_on_train (bool, optional): Keep training documents in the split.
            Defaults to False.

    Returns:
        LabeledCorpus: The held-out documents in corpus order
    """
    if eval_on_train or not selected_ids:
        return corpus

    excluded = frozenset(selected_ids)
    held_out = tuple(
        entry for entry in corpus.entries if entry.document.id not in excluded
    )

    if not held_out:
        throw(
            "Every document was used for training; pass --eval-on-train to evaluate on them",
            EmptyCorpus,
        )

    return LabeledCorpus(entries=held_out, name=f"{corpus.name}-held-out")
