import math
from unittest import TestCase

import numpy as np

from ..corpus.protocol import ProtocolConfig, popular_keywords, select_fewshot_documents
from ..corpus.synthetic import SyntheticCorpusConfig, generate_corpus
from ..embeddings.backends import HashEmbedder, PrecomputedEmbedder
from ..embeddings.vectors import cosine_similarity
from ..exceptions import DimensionMismatch, NoRelevantCandidates, ValidationError
from ..extraction.candidates import Document, NgramRange, extract_candidates
from .few_shot import (
    WEIGHT_NAMES,
    AdapterWeights,
    TrainConfig,
    TrainingPair,
    adapter_attention,
    adapter_forward,
    adapter_gradient,
    adapter_loss,
    init_adapter,
    train_adapter,
)


def random_weights(rng: np.random.Generator, d: int, output_scale: float = 0.5) -> AdapterWeights:
    return AdapterWeights(
        W_Q=rng.uniform(-1, 1, size=(d, d)),
        W_K=rng.uniform(-1, 1, size=(d, d)),
        W_V=rng.uniform(-1, 1, size=(d, d)),
        W_O=output_scale * rng.normal(size=(d, d)),
    )


def random_instance(rng: np.random.Generator, d: int, k: int):
    E_D = rng.normal(size=d)
    candidates = [rng.normal(size=d) for _ in range(k)]
    mask = [bool(flag) for flag in rng.integers(0, 2, size=k)]
    mask[int(rng.integers(k))] = True

    return E_D, candidates, mask


def reference_loss(w: AdapterWeights, E_D, candidates, mask, cfg: TrainConfig) -> float:
    """Loop-by-loop evaluation of the adapter and its loss"""
    d = len(E_D)
    context = [E_D] + list(candidates)
    outputs = []

    for e in candidates:
        q = [sum(w.W_Q[i][j] * e[j] for j in range(d)) for i in range(d)]
        scores, values = [], []

        for m in context:
            key = [sum(w.W_K[i][j] * m[j] for j in range(d)) for i in range(d)]
            values.append([sum(w.W_V[i][j] * m[j] for j in range(d)) for i in range(d)])
            scores.append(sum(q[i] * key[i] for i in range(d)) / math.sqrt(d))

        top = max(scores)
        exps = [math.exp(s - top) for s in scores]
        weights = [x / sum(exps) for x in exps]
        o = [sum(weights[j] * values[j][i] for j in range(len(context))) for i in range(d)]
        outputs.append(
            [e[i] + sum(w.W_O[i][j] * o[j] for j in range(d)) for i in range(d)]
        )

    def mse(u, v) -> float:
        return sum((u[i] - v[i]) ** 2 for i in range(d)) / d

    relevant = [mse(E_D, a) for a, flag in zip(outputs, mask) if flag]
    anchored = [mse(a, e) for a, e, flag in zip(outputs, candidates, mask) if not flag]

    loss = cfg.lambda_relevant * sum(relevant) / len(relevant)
    if anchored:
        loss += cfg.lambda_anchor * sum(anchored) / len(anchored)

    return loss


def numeric_gradient(w: AdapterWeights, name: str, E_D, candidates, mask, cfg, eps=1e-4):
    matrix = getattr(w, name)
    gradient = np.zeros_like(matrix)

    for index in np.ndindex(matrix.shape):
        original = matrix[index]

        matrix[index] = original + eps
        upper = adapter_loss(w, E_D, candidates, mask, cfg)
        matrix[index] = original - eps
        lower = adapter_loss(w, E_D, candidates, mask, cfg)
        matrix[index] = original

        gradient[index] = (upper - lower) / (2 * eps)

    return gradient


class TestAdapterForward(TestCase):
    """Test Cases"""

    def test_init_adapter(self) -> None:
        w = init_adapter(4, 0)

        np.testing.assert_array_equal(w.W_O, np.zeros((4, 4)))
        for name in ("W_Q", "W_K", "W_V"):
            self.assertTrue(np.all(np.abs(getattr(w, name)) <= 0.5))

        again = init_adapter(4, 0)
        for name in WEIGHT_NAMES:
            np.testing.assert_array_equal(getattr(w, name), getattr(again, name))

        self.assertFalse(np.array_equal(w.W_Q, init_adapter(4, 1).W_Q))

    def test_fresh_adapter_is_identity(self) -> None:
        rng = np.random.default_rng(0)

        for _ in range(20):
            d, k = int(rng.integers(1, 9)), int(rng.integers(1, 6))
            w = init_adapter(d, int(rng.integers(1000)))
            E_D, candidates, _ = random_instance(rng, d, k)

            for adapted, original in zip(adapter_forward(w, E_D, candidates), candidates):
                np.testing.assert_array_equal(adapted, original)

    def test_hand_computed_example(self) -> None:
        identity = np.eye(2)
        w = AdapterWeights(identity, identity.copy(), identity.copy(), identity.copy())

        (a_c,) = adapter_forward(w, np.array([0.0, 1.0]), [np.array([1.0, 0.0])])

        # softmax over scores (0, 1/sqrt(2)) for the keys (E_D, e_c)
        weight_on_document = 1 / (1 + math.exp(1 / math.sqrt(2)))
        np.testing.assert_allclose(
            a_c, [2 - weight_on_document, weight_on_document], atol=1e-12
        )
        np.testing.assert_allclose(a_c, [1.669762, 0.330238], atol=1e-6)

    def test_attention_rows_sum_to_one(self) -> None:
        rng = np.random.default_rng(1)

        for _ in range(20):
            d, k = int(rng.integers(1, 9)), int(rng.integers(1, 6))
            E_D, candidates, _ = random_instance(rng, d, k)
            attention = adapter_attention(random_weights(rng, d), E_D, candidates)

            self.assertEqual(attention.shape, (k, k + 1))
            np.testing.assert_allclose(attention.sum(axis=1), np.ones(k), atol=1e-9)

    def test_permutation_equivariance(self) -> None:
        rng = np.random.default_rng(2)
        w = random_weights(rng, 5)
        cfg = TrainConfig()
        E_D, candidates, mask = random_instance(rng, 5, 5)
        order = rng.permutation(5)

        outputs = adapter_forward(w, E_D, candidates)
        permuted = adapter_forward(w, E_D, [candidates[i] for i in order])

        for position, index in enumerate(order):
            np.testing.assert_allclose(permuted[position], outputs[index], atol=1e-12)

        self.assertAlmostEqual(
            adapter_loss(w, E_D, candidates, mask, cfg),
            adapter_loss(w, E_D, [candidates[i] for i in order], [mask[i] for i in order], cfg),
            delta=1e-12,
        )

    def test_dimension_mismatch(self) -> None:
        w = init_adapter(4, 0)

        with self.assertRaises(DimensionMismatch):
            adapter_forward(w, np.ones(3), [np.ones(3)])

        with self.assertRaises(DimensionMismatch):
            w.validate_dimension(8)

        with self.assertRaises(DimensionMismatch):
            AdapterWeights(np.eye(2), np.eye(2), np.eye(3), np.eye(2))


class TestAdapterLoss(TestCase):
    """Test Cases"""

    def test_hand_computed_loss(self) -> None:
        w = init_adapter(2, 0)

        loss = adapter_loss(w, np.array([1.0, 0.0]), [np.zeros(2)], [True], TrainConfig())

        self.assertEqual(loss, 0.5)

    def test_untrained_adapter_has_no_anchor_term(self) -> None:
        rng = np.random.default_rng(4)
        E_D, candidates, mask = random_instance(rng, 6, 5)
        cfg = TrainConfig(lambda_relevant=0.7, lambda_anchor=3.0)

        expected = 0.7 * np.mean(
            [np.mean((E_D - e) ** 2) for e, flag in zip(candidates, mask) if flag]
        )

        self.assertAlmostEqual(
            adapter_loss(init_adapter(6, 9), E_D, candidates, mask, cfg), expected, delta=1e-12
        )

    def test_matches_reference_implementation(self) -> None:
        rng = np.random.default_rng(5)

        for _ in range(50):
            w = random_weights(rng, 3)
            E_D, candidates, mask = random_instance(rng, 3, 4)
            cfg = TrainConfig(
                lambda_relevant=float(rng.uniform(0.1, 2)),
                lambda_anchor=float(rng.uniform(0, 2)),
            )

            self.assertAlmostEqual(
                adapter_loss(w, E_D, candidates, mask, cfg),
                reference_loss(w, E_D, candidates, mask, cfg),
                delta=1e-10,
            )

    def test_loss_decomposition(self) -> None:
        rng = np.random.default_rng(6)
        w = random_weights(rng, 4)
        E_D, candidates, _ = random_instance(rng, 4, 4)
        mask = [True, False, True, False]

        both = adapter_loss(w, E_D, candidates, mask, TrainConfig())
        relevant_only = adapter_loss(
            w, E_D, candidates, mask, TrainConfig(lambda_relevant=1.0, lambda_anchor=0.0)
        )
        anchor_only = adapter_loss(
            w, E_D, candidates, mask, TrainConfig(lambda_relevant=0.0, lambda_anchor=1.0)
        )

        self.assertAlmostEqual(both, relevant_only + anchor_only, delta=1e-12)
        self.assertGreater(anchor_only, 0.0)

    def test_no_relevant_candidates(self) -> None:
        with self.assertRaises(NoRelevantCandidates):
            adapter_loss(init_adapter(2, 0), np.ones(2), [np.ones(2)], [False], TrainConfig())

    def test_train_config_validation(self) -> None:
        for kwargs in (
            {"learning_rate": 0.0},
            {"epochs": 0},
            {"lambda_relevant": -1.0},
            {"lambda_relevant": 0.0, "lambda_anchor": 0.0},
        ):
            with self.subTest(kwargs=kwargs), self.assertRaises(ValidationError):
                TrainConfig(**kwargs)


class TestAdapterGradient(TestCase):
    """Test Cases"""

    def assert_close_to_numeric(self, analytic, numeric) -> None:
        tolerance = 1e-4 * np.maximum(np.abs(analytic), np.abs(numeric)) + 1e-7
        self.assertTrue(
            np.all(np.abs(analytic - numeric) <= tolerance),
            f"max deviation {np.max(np.abs(analytic - numeric))}",
        )

    def test_matches_finite_differences(self) -> None:
        rng = np.random.default_rng(7)

        for _ in range(100):
            d, k = int(rng.integers(1, 9)), int(rng.integers(1, 6))
            w = random_weights(rng, d)
            E_D, candidates, mask = random_instance(rng, d, k)
            cfg = TrainConfig(
                lambda_relevant=float(rng.uniform(0.1, 2)),
                lambda_anchor=float(rng.uniform(0, 2)),
            )
            analytic = adapter_gradient(w, E_D, candidates, mask, cfg)

            for name in WEIGHT_NAMES:
                self.assert_close_to_numeric(
                    getattr(analytic, name),
                    numeric_gradient(w, name, E_D, candidates, mask, cfg),
                )

    def test_zero_output_projection_blocks_inner_gradients(self) -> None:
        rng = np.random.default_rng(8)
        w = init_adapter(5, 3)
        E_D, candidates, mask = random_instance(rng, 5, 4)
        cfg = TrainConfig(lambda_relevant=1.0, lambda_anchor=0.0)

        gradients = adapter_gradient(w, E_D, candidates, mask, cfg)

        for name in ("W_Q", "W_K", "W_V"):
            np.testing.assert_array_equal(getattr(gradients, name), np.zeros((5, 5)))

        self.assertTrue(np.any(gradients.W_O != 0))
        self.assert_close_to_numeric(
            gradients.W_O, numeric_gradient(w, "W_O", E_D, candidates, mask, cfg)
        )

    def test_gradient_vanishes_after_convergence(self) -> None:
        store = {
            "soil water": np.array([0.6, 0.8]),
            "soil": np.array([1.0, 0.0]),
            "water": np.array([0.0, 1.0]),
        }
        embedder = PrecomputedEmbedder(store)
        pair = TrainingPair(Document("toy", "soil water"), frozenset({"soil"}))
        cfg = TrainConfig(learning_rate=0.5, epochs=3000, lambda_anchor=0.0, rng_seed=1)

        result = train_adapter([pair], embedder, NgramRange(1, 1), frozenset(), cfg)
        gradients = adapter_gradient(
            result.weights,
            store["soil water"],
            [store["soil"], store["water"]],
            [True, False],
            cfg,
        )

        for name in WEIGHT_NAMES:
            self.assertLess(np.max(np.abs(getattr(gradients, name))), 1e-3)

        self.assertLess(result.loss_history[-1], result.loss_history[0])


class TestTrainAdapter(TestCase):
    """Test Cases"""

    @classmethod
    def setUpClass(cls) -> None:
        cls.embedder = HashEmbedder(dimension=128, seed=0)
        cls.corpus = generate_corpus(SyntheticCorpusConfig(documents=60, seed=0))
        protocol = ProtocolConfig(0.10)
        cls.pairs = select_fewshot_documents(
            cls.corpus, popular_keywords(cls.corpus, protocol), protocol
        )

    def train(self, pairs, epochs=10, **kwargs):
        return train_adapter(
            pairs,
            self.embedder,
            NgramRange(1, 1),
            frozenset(),
            TrainConfig(epochs=epochs, **kwargs),
        )

    def test_single_pair_loss_decreases(self) -> None:
        result = self.train(self.pairs[:1], epochs=10)
        history = result.loss_history

        self.assertEqual(len(history), 10)
        self.assertTrue(all(math.isfinite(loss) for loss in history))

        increases = sum(later >= earlier for earlier, later in zip(history, history[1:]))
        self.assertLessEqual(increases, 1)

    def test_training_is_deterministic(self) -> None:
        first = self.train(self.pairs, epochs=5, rng_seed=3)
        second = self.train(self.pairs, epochs=5, rng_seed=3)

        self.assertEqual(first.loss_history, second.loss_history)
        for name in WEIGHT_NAMES:
            np.testing.assert_array_equal(
                getattr(first.weights, name), getattr(second.weights, name)
            )

    def test_relevant_candidates_move_toward_document(self) -> None:
        weights = self.train(self.pairs, epochs=10).weights

        for pair in self.pairs:
            surfaces = extract_candidates(pair.document, NgramRange(1, 1)).surfaces
            E_D = self.embedder.embed_one(pair.document.text)
            candidates = self.embedder.embed(surfaces)
            adapted = adapter_forward(weights, E_D, candidates)

            for surface, before, after in zip(surfaces, candidates, adapted):
                if surface in pair.relevant_phrases:
                    self.assertGreater(
                        cosine_similarity(after, E_D), cosine_similarity(before, E_D)
                    )

    def test_missing_relevant_phrases_are_injected(self) -> None:
        pair = TrainingPair(
            Document("d1", "soil moisture in dry regions"), frozenset({"crop yield", "soil"})
        )

        result = self.train([pair], epochs=1)

        self.assertEqual(result.injected_phrases, 1)

    def test_starting_weights_are_not_mutated(self) -> None:
        start = init_adapter(128, 4)
        snapshot = start.copy()
        train_adapter(
            self.pairs[:2], self.embedder, NgramRange(1, 1), frozenset(), TrainConfig(epochs=2),
            weights=start,
        )

        for name in WEIGHT_NAMES:
            np.testing.assert_array_equal(getattr(start, name), getattr(snapshot, name))

    def test_invalid_inputs(self) -> None:
        with self.assertRaises(ValidationError):
            self.train([], epochs=1)

        with self.assertRaises(NoRelevantCandidates):
            self.train([TrainingPair(Document("d1", "soil"), frozenset())], epochs=1)

        with self.assertRaises(ValidationError):
            TrainingPair(Document("d1", "soil"), frozenset({"Soil "}))

        with self.assertRaises(DimensionMismatch):
            train_adapter(
                self.pairs[:1],
                self.embedder,
                NgramRange(1, 1),
                frozenset(),
                TrainConfig(epochs=1),
                weights=init_adapter(4, 0),
            )
