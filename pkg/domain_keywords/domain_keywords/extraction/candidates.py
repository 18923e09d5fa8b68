"""Candidate phrase extraction: tokenization, n-gram enumeration and stopword filtering"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

from nltk.corpus import stopwords

from ..constants import (
    DEFAULT_NGRAM_MAX,
    DEFAULT_NGRAM_MIN,
    STOPWORDS_FIXTURE_NAME,
    STOPWORDS_LANGUAGE,
)
from ..exceptions import EmptyCandidateSet, ParseError, ValidationError
from ..handlers import throw
from ..logger import keyword_logger
from ..utils import read_lines_file

# alphanumeric runs, hyphens allowed only between alphanumerics
TOKEN_PATTERN = re.compile(r"[^\W_]+(?:-[^\W_]+)*")


@dataclass(frozen=True)
class NgramRange:
    n_ini: int = DEFAULT_NGRAM_MIN
    n_fin: int = DEFAULT_NGRAM_MAX

    def __post_init__(self) -> None:
        if not 1 <= self.n_ini <= self.n_fin:
            throw(
                f"Invalid n-gram range [{self.n_ini}, {self.n_fin}]: "
                "bounds must satisfy 1 <= min <= max",
                ValidationError,
            )


@dataclass(frozen=True)
class Document:
    id: str
    text: str

    def __post_init__(self) -> None:
        if not tokenize(self.text):
            throw(f"Document {self.id!r} has no tokens", ValidationError)


@dataclass(frozen=True)
class CandidatePhrase:
    surface: str
    token_count: int


@dataclass(frozen=True)
class CandidateSet:
    """Deduplicated candidate phrases in first-occurrence order"""

    phrases: tuple[CandidatePhrase, ...] = field(default_factory=tuple)

    @property
    def surfaces(self) -> list[str]:
        return [phrase.surface for phrase in self.phrases]

    def __iter__(self) -> Iterator[CandidatePhrase]:
        return iter(self.phrases)

    def __len__(self) -> int:
        return len(self.phrases)

    def __contains__(self, surface: object) -> bool:
        return any(phrase.surface == surface for phrase in self.phrases)


def tokenize(text: str) -> list[str]:
    """Splits text into lowercased alphanumeric tokens, keeping internal hyphens

    Args:
        text (str): The text to tokenize

    Returns:
        list[str]: The tokens in text order
    """
    composed = unicodedata.normalize("NFC", text)
    return [token.lower() for token in TOKEN_PATTERN.findall(composed)]


def normalize_phrase(phrase: str) -> str:
    """Lowercases, NFC-composes, collapses internal whitespace and trims a phrase

    Args:
        phrase (str): The raw phrase

    Returns:
        str: The normalized phrase
    """
    composed = unicodedata.normalize("NFC", phrase).lower()
    return " ".join(composed.split())


def extract_candidates(
    doc: Document,
    ngram_range: NgramRange,
    stopwords: Iterable[str] = frozenset(),
    allow_empty: bool = False,
) -> CandidateSet:
    """Enumerates the contiguous token n-grams of a document.

    An n-gram is rejected when its first or last token is a stopword;
    interior stopwords are kept ("head of state"). Duplicates keep their
    first occurrence.

    Args:
        doc (Document): The document to extract from
        ngram_range (NgramRange): Inclusive bounds on the n-gram length
        stopwords (Iterable[str], optional): Lowercased stopwords. Defaults to none.
        allow_empty (bool, optional): Return an empty set instead of raising. Defaults to False.

    Returns:
        CandidateSet: The candidates in first-occurrence order
    """
    stopword_set = frozenset(stopwords)
    tokens = tokenize(doc.text)
    seen: dict[str, CandidatePhrase] = {}

    # n-major order: all unigrams first, then bigrams, ...
    for n in range(ngram_range.n_ini, ngram_range.n_fin + 1):
        for start in range(len(tokens) - n + 1):
            gram = tokens[start : start + n]

            if gram[0] in stopword_set or gram[-1] in stopword_set:
                continue

            surface = " ".join(gram)
            if surface not in seen:
                seen[surface] = CandidatePhrase(surface=surface, token_count=n)

    if not seen and not allow_empty:
        throw(f"No candidates survived extraction for {doc.id!r}", EmptyCandidateSet)

    return CandidateSet(phrases=tuple(seen.values()))


def _bundled_stopwords() -> frozenset[str]:
    fixture = (
        resources.files("domain_keywords")
        .joinpath("fixtures")
        .joinpath(STOPWORDS_FIXTURE_NAME)
    )

    try:
        text = fixture.read_text(encoding="utf-8")

    except OSError as error:
        throw(f"Bundled stopword list is unreadable: {error}", ParseError)

    words = (line.split("#", 1)[0].strip().lower() for line in text.splitlines())
    return frozenset(word for word in words if word)


@lru_cache(maxsize=1)
def english_stopwords() -> frozenset[str]:
    """nltk's English stopword list.

    Offline installs without the nltk stopwords corpus get the bundled English
    list instead, with a warning naming the download.
    """
    try:
        return frozenset(word.lower() for word in stopwords.words(STOPWORDS_LANGUAGE))

    except LookupError:
        keyword_logger.warning(
            "nltk stopwords corpus not found, using the bundled English list; "
            'run nltk.download("stopwords") to install it'
        )

        return _bundled_stopwords()


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Loads a stopword list, nltk's English list unless a file is given

    Args:
        path (str | Path | None, optional): UTF-8 file, one word per line. Defaults to None.

    Returns:
        frozenset[str]: The lowercased stopwords
    """
    if path is not None:
        return frozenset(word.lower() for word in read_lines_file(path))

    return english_stopwords()
