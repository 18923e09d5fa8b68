from itertools import product
from unittest import TestCase
from unittest.mock import patch

import numpy as np

from ..exceptions import EmptyCandidateSet, ValidationError
from . import candidates
from .candidates import (
    Document,
    NgramRange,
    english_stopwords,
    extract_candidates,
    load_stopwords,
    normalize_phrase,
    tokenize,
)


def exhaustive_candidates(
    tokens: list[str], n_ini: int, n_fin: int, stopwords: set[str]
) -> list[str]:
    """Straight enumeration of every n-gram, filtered and deduplicated"""
    grams = []
    for n in range(n_ini, n_fin + 1):
        for start in range(0, len(tokens) - n + 1):
            gram = tokens[start : start + n]
            if gram[0] not in stopwords and gram[-1] not in stopwords:
                grams.append(" ".join(gram))

    unique = []
    for gram in grams:
        if gram not in unique:
            unique.append(gram)

    return unique


class TestCandidates(TestCase):
    """Test Cases"""

    def test_tokenize(self) -> None:
        self.assertEqual(tokenize("High-energy physics!"), ["high-energy", "physics"])
        self.assertEqual(tokenize(""), [])
        self.assertEqual(tokenize("a  b\tc"), ["a", "b", "c"])
        self.assertEqual(tokenize("-edge- cases_here"), ["edge", "cases", "here"])
        self.assertEqual(tokenize("e\u0301tude"), ["\u00e9tude"])

    def test_normalize_phrase(self) -> None:
        self.assertEqual(normalize_phrase("  Food  Security "), "food security")
        self.assertEqual(normalize_phrase("CERN"), "cern")
        self.assertEqual(normalize_phrase("e\u0301tude"), "\u00e9tude")

    def test_ngram_range_validation(self) -> None:
        with self.assertRaises(ValidationError):
            NgramRange(0, 1)

        with self.assertRaises(ValidationError):
            NgramRange(3, 2)

    def test_document_needs_tokens(self) -> None:
        with self.assertRaises(ValidationError):
            Document(id="d1", text="  ... !! ")

    def test_extract_candidates_examples(self) -> None:
        doc = Document(id="d1", text="high energy physics")
        self.assertEqual(
            extract_candidates(doc, NgramRange(1, 2)).surfaces,
            ["high", "energy", "physics", "high energy", "energy physics"],
        )

        doc = Document(id="d2", text="the cat")
        self.assertEqual(
            extract_candidates(doc, NgramRange(1, 1), {"the"}).surfaces, ["cat"]
        )

        doc = Document(id="d3", text="a b a b")
        self.assertEqual(extract_candidates(doc, NgramRange(2, 2)).surfaces, ["a b", "b a"])

    def test_interior_stopwords_are_kept(self) -> None:
        doc = Document(id="d1", text="head of state")
        surfaces = extract_candidates(doc, NgramRange(3, 3), {"of"}).surfaces

        self.assertEqual(surfaces, ["head of state"])

    def test_empty_candidate_set(self) -> None:
        doc = Document(id="d1", text="the of and")

        with self.assertRaises(EmptyCandidateSet):
            extract_candidates(doc, NgramRange(1, 2), {"the", "of", "and"})

        empty = extract_candidates(
            doc, NgramRange(1, 2), {"the", "of", "and"}, allow_empty=True
        )
        self.assertEqual(len(empty), 0)

    def test_matches_exhaustive_enumeration(self) -> None:
        rng = np.random.default_rng(3)
        vocabulary = ["alpha", "beta", "gamma", "delta", "the", "of"]

        for _ in range(50):
            tokens = [str(t) for t in rng.choice(vocabulary, size=int(rng.integers(1, 21)))]
            n_ini = int(rng.integers(1, 4))
            n_fin = n_ini + int(rng.integers(0, 3))
            stopwords = {"the", "of"}

            expected = exhaustive_candidates(tokens, n_ini, n_fin, stopwords)
            doc = Document(id="random", text=" ".join(tokens))
            candidates = extract_candidates(
                doc, NgramRange(n_ini, n_fin), stopwords, allow_empty=True
            )

            self.assertEqual(candidates.surfaces, expected)

            for phrase in candidates:
                self.assertTrue(n_ini <= len(tokenize(phrase.surface)) <= n_fin)
                self.assertEqual(phrase.token_count, len(phrase.surface.split()))

    def test_unigrams_count_distinct_tokens(self) -> None:
        text = "soil water soil crop water yield"
        candidates = extract_candidates(Document("d", text), NgramRange(1, 1))

        self.assertEqual(len(candidates), len(set(tokenize(text))))
        self.assertIn("crop", candidates)
        self.assertNotIn("maize", candidates)

    def test_deterministic(self) -> None:
        doc = Document(id="d1", text="Soil moisture and soil carbon in dry soil")
        first = extract_candidates(doc, NgramRange(1, 3), load_stopwords())

        for _ in range(3):
            self.assertEqual(
                extract_candidates(doc, NgramRange(1, 3), load_stopwords()), first
            )

    def test_english_stopwords(self) -> None:
        stopwords = load_stopwords()

        for word in ("the", "of", "and", "is"):
            self.assertIn(word, stopwords)

        self.assertNotIn("fishery", stopwords)
        self.assertTrue(all(word == word.lower() for word in stopwords))

    def test_small_grid_of_ranges(self) -> None:
        doc = Document(id="d1", text="one two three four")

        for n_ini, n_fin in product(range(1, 5), range(1, 5)):
            if n_ini > n_fin:
                continue

            surfaces = extract_candidates(doc, NgramRange(n_ini, n_fin)).surfaces
            expected = sum(4 - n + 1 for n in range(n_ini, n_fin + 1))

            self.assertEqual(len(surfaces), expected)


class TestEnglishStopwords(TestCase):
    """Test Cases"""

    def setUp(self) -> None:
        english_stopwords.cache_clear()
        self.addCleanup(english_stopwords.cache_clear)

    def test_reads_the_nltk_list(self) -> None:
        with patch.object(candidates, "stopwords") as corpus:
            corpus.words.return_value = ["The", "of", "and"]

            self.assertEqual(load_stopwords(), frozenset({"the", "of", "and"}))

        corpus.words.assert_called_once_with("english")

    def test_loaded_once(self) -> None:
        with patch.object(candidates, "stopwords") as corpus:
            corpus.words.return_value = ["the"]
            load_stopwords()
            load_stopwords()

        corpus.words.assert_called_once()

    def test_bundled_list_when_corpus_is_missing(self) -> None:
        with patch.object(candidates, "stopwords") as corpus:
            corpus.words.side_effect = LookupError("Resource stopwords not found")

            with self.assertLogs("domain_keywords", level="WARNING") as logs:
                words = load_stopwords()

        self.assertTrue(any('nltk.download("stopwords")' in line for line in logs.output))
        for word in ("the", "of", "and", "before"):
            self.assertIn(word, words)

        self.assertNotIn("fishery", words)

    def test_file_overrides_the_english_list(self) -> None:
        with patch.object(candidates, "stopwords") as corpus:
            with patch.object(candidates, "read_lines_file", return_value=["Soil", "crop"]):
                self.assertEqual(load_stopwords("words.txt"), frozenset({"soil", "crop"}))

        corpus.words.assert_not_called()
