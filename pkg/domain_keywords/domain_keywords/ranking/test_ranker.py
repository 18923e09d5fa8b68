from unittest import TestCase

import numpy as np

from ..exceptions import DimensionMismatch, ValidationError
from .ranker import ScoredKeyword, mmr_diversify, score_candidates, top_k


def plain_cosine(u: np.ndarray, v: np.ndarray) -> float:
    return float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))


def greedy_oracle(E_D, adapted, phrases, k, diversity) -> list[str]:
    """One candidate at a time, every objective recomputed from scratch"""
    chosen: list[int] = []

    while len(chosen) < min(k, len(phrases)):
        best, best_key = None, None

        for index, phrase in enumerate(phrases):
            if index in chosen:
                continue

            relevance = plain_cosine(adapted[index], E_D)
            if chosen:
                redundancy = max(plain_cosine(adapted[index], adapted[s]) for s in chosen)
                objective = (1 - diversity) * relevance - diversity * redundancy
            else:
                objective = relevance

            key = (-objective, phrase)
            if best_key is None or key < best_key:
                best, best_key = index, key

        chosen.append(best)

    return [phrases[index] for index in chosen]


class TestScoreCandidates(TestCase):
    """Test Cases"""

    def test_candidate_equal_to_document(self) -> None:
        E_D = np.array([0.2, 0.9])

        (keyword,) = score_candidates(E_D, [E_D.copy()], ["match"])

        self.assertEqual(keyword.phrase, "match")
        self.assertAlmostEqual(keyword.score, 1.0, delta=1e-12)

    def test_ties_break_by_phrase(self) -> None:
        E_D = np.array([1.0, 0.0])
        vector = np.array([1.0, 1.0])

        scored = score_candidates(E_D, [vector, vector.copy()], ["zeta", "alpha"])

        self.assertEqual([keyword.phrase for keyword in scored], ["alpha", "zeta"])

    def test_matches_brute_force_sort(self) -> None:
        rng = np.random.default_rng(0)

        for _ in range(20):
            E_D = rng.normal(size=4)
            adapted = list(rng.normal(size=(6, 4)))
            phrases = [f"phrase {index}" for index in range(6)]

            expected = sorted(
                zip(phrases, (plain_cosine(a, E_D) for a in adapted)),
                key=lambda item: (-item[1], item[0]),
            )
            scored = score_candidates(E_D, adapted, phrases)

            self.assertEqual([k.phrase for k in scored], [phrase for phrase, _ in expected])
            np.testing.assert_allclose(
                [k.score for k in scored], [score for _, score in expected], atol=1e-12
            )

    def test_scale_invariance(self) -> None:
        rng = np.random.default_rng(1)
        E_D, adapted = rng.normal(size=5), list(rng.normal(size=(4, 5)))
        phrases = ["a", "b", "c", "d"]

        first = score_candidates(E_D, adapted, phrases)
        scaled = score_candidates(3.5 * E_D, [0.25 * a for a in adapted], phrases)

        self.assertEqual([k.phrase for k in first], [k.phrase for k in scaled])

    def test_invalid_inputs(self) -> None:
        with self.assertRaises(ValidationError):
            score_candidates(np.ones(2), [], [])

        with self.assertRaises(DimensionMismatch):
            score_candidates(np.ones(2), [np.ones(2)], ["a", "b"])

        with self.assertRaises(ValidationError):
            score_candidates(np.ones(2), [np.ones(2), np.ones(2)], ["a", "a"])


class TestTopK(TestCase):
    """Test Cases"""

    def setUp(self) -> None:
        self.scored = [
            ScoredKeyword("e", 0.9),
            ScoredKeyword("b", 0.7),
            ScoredKeyword("a", 0.5),
            ScoredKeyword("d", 0.5),
            ScoredKeyword("c", 0.1),
        ]

    def test_cutoffs(self) -> None:
        self.assertEqual(top_k(self.scored, 10), self.scored)
        self.assertEqual(top_k(self.scored, 1), [ScoredKeyword("e", 0.9)])
        self.assertEqual([k.phrase for k in top_k(self.scored, 3)], ["e", "b", "a"])

    def test_k_must_be_positive(self) -> None:
        with self.assertRaises(ValidationError):
            top_k(self.scored, 0)


class TestMmrDiversify(TestCase):
    """Test Cases"""

    def test_zero_diversity_is_plain_ranking(self) -> None:
        rng = np.random.default_rng(2)

        for _ in range(20):
            E_D, adapted = rng.normal(size=4), list(rng.normal(size=(7, 4)))
            phrases = [f"p{index}" for index in range(7)]
            k = int(rng.integers(1, 9))

            self.assertEqual(
                mmr_diversify(E_D, adapted, phrases, k, 0.0),
                top_k(score_candidates(E_D, adapted, phrases), k),
            )

    def test_duplicates_are_skipped(self) -> None:
        E_D = np.array([1.0, 0.2])
        adapted = [np.array([1.0, 0.1]), np.array([1.0, 0.1]), np.array([0.0, 1.0])]

        picks = mmr_diversify(E_D, adapted, ["first", "copy", "other"], 2, 1.0)

        self.assertEqual([k.phrase for k in picks], ["copy", "other"])
        self.assertAlmostEqual(picks[1].score, plain_cosine(adapted[2], E_D), delta=1e-12)

    def test_matches_greedy_oracle(self) -> None:
        rng = np.random.default_rng(3)

        for _ in range(30):
            E_D, adapted = rng.normal(size=3), list(rng.normal(size=(5, 3)))
            phrases = ["v", "w", "x", "y", "z"]

            picks = mmr_diversify(E_D, adapted, phrases, 3, 0.5)

            self.assertEqual(
                [k.phrase for k in picks], greedy_oracle(E_D, adapted, phrases, 3, 0.5)
            )

    def test_invalid_diversity(self) -> None:
        with self.assertRaises(ValidationError):
            mmr_diversify(np.ones(2), [np.ones(2)], ["a"], 1, 1.5)
