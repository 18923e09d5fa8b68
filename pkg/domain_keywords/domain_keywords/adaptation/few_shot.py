"""Few-shot attention adapter.

A single-head scaled dot-product attention layer recomputes each candidate
embedding from the context [E_D, e_c1, ..., e_ck]:

    q_i = W_Q e_i,  key_j = W_K M_j,  val_j = W_V M_j
    alpha_ij = softmax_j(q_i . key_j / sqrt(d))
    a_i = e_i + W_O sum_j alpha_ij val_j

W_O starts at zero, so a fresh adapter is exactly the identity. Training
pulls relevant candidates toward E_D and anchors the rest to their original
embeddings; gradients are derived by hand and applied with plain SGD.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from ..constants import (
    DEFAULT_EPOCHS,
    DEFAULT_LAMBDA_ANCHOR,
    DEFAULT_LAMBDA_RELEVANT,
    DEFAULT_LEARNING_RATE,
    DEFAULT_MODEL_NAME,
    DEFAULT_RNG_SEED,
)
from ..embeddings.backends import Embedder
from ..embeddings.vectors import EmbeddingVector
from ..exceptions import DimensionMismatch, NoRelevantCandidates, ValidationError
from ..extraction.candidates import (
    Document,
    NgramRange,
    extract_candidates,
    normalize_phrase,
)
from ..handlers import throw
from ..logger import keyword_logger

Matrix = NDArray[np.float64]
WEIGHT_NAMES = ("W_Q", "W_K", "W_V", "W_O")


@dataclass
class AdapterWeights:
    W_Q: Matrix
    W_K: Matrix
    W_V: Matrix
    W_O: Matrix
    model_name: str = DEFAULT_MODEL_NAME

    def __post_init__(self) -> None:
        d = self.W_Q.shape[0]

        for name in WEIGHT_NAMES:
            matrix = getattr(self, name)

            if matrix.shape != (d, d):
                throw(
                    f"{name} has shape {matrix.shape}; every adapter matrix must be {d}x{d}",
                    DimensionMismatch,
                )

            if not np.all(np.isfinite(matrix)):
                throw(f"{name} has non-finite entries", ValidationError)

    @property
    def dimension(self) -> int:
        return self.W_Q.shape[0]

    def matrices(self) -> dict[str, Matrix]:
        return {name: getattr(self, name) for name in WEIGHT_NAMES}

    def copy(self) -> AdapterWeights:
        return AdapterWeights(
            **{name: matrix.copy() for name, matrix in self.matrices().items()},
            model_name=self.model_name,
        )

    def validate_dimension(self, d: int) -> None:
        if d != self.dimension:
            throw(
                f"Adapter was trained for dimension {self.dimension}, embedder produces {d}",
                DimensionMismatch,
            )


@dataclass(frozen=True)
class TrainingPair:
    document: Document
    relevant_phrases: frozenset[str]

    def __post_init__(self) -> None:
        for phrase in self.relevant_phrases:
            if not phrase or phrase != normalize_phrase(phrase):
                throw(
                    f"Relevant phrase {phrase!r} of {self.document.id!r} is not normalized",
                    ValidationError,
                )


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = DEFAULT_LEARNING_RATE
    epochs: int = DEFAULT_EPOCHS
    lambda_relevant: float = DEFAULT_LAMBDA_RELEVANT
    lambda_anchor: float = DEFAULT_LAMBDA_ANCHOR
    rng_seed: int = DEFAULT_RNG_SEED

    def __post_init__(self) -> None:
        error_title = "Training Setup Error"

        if not self.learning_rate > 0:
            throw(f"--lr must be positive, got {self.learning_rate}", title=error_title)

        if self.epochs < 1:
            throw(f"--epochs must be at least 1, got {self.epochs}", title=error_title)

        if self.lambda_relevant < 0 or self.lambda_anchor < 0:
            throw("Loss weights must be non-negative", title=error_title)

        if self.lambda_relevant + self.lambda_anchor <= 0:
            throw("At least one loss weight must be positive", title=error_title)


@dataclass
class AdapterGradients:
    W_Q: Matrix
    W_K: Matrix
    W_V: Matrix
    W_O: Matrix

    def matrices(self) -> dict[str, Matrix]:
        return {name: getattr(self, name) for name in WEIGHT_NAMES}


@dataclass
class TrainResult:
    weights: AdapterWeights
    loss_history: list[float] = field(default_factory=list)
    injected_phrases: int = 0


@dataclass
class _ForwardCache:
    E: Matrix
    M: Matrix
    Q: Matrix
    K: Matrix
    V: Matrix
    A: Matrix
    O: Matrix
    out: Matrix


def init_adapter(
    d: int, seed: int = DEFAULT_RNG_SEED, model_name: str = DEFAULT_MODEL_NAME
) -> AdapterWeights:
    """Seeded initialisation: W_Q, W_K, W_V ~ U[-1/√d, 1/√d], W_O = 0

    Args:
        d (int): The embedding dimension
        seed (int, optional): RNG seed. Defaults to DEFAULT_RNG_SEED.
        model_name (str, optional): Embedding model the adapter belongs to.

    Returns:
        AdapterWeights: Weights that make the adapter the identity map
    """
    if d <= 0:
        throw(f"Adapter dimension must be positive, got {d}", ValidationError)

    rng = np.random.default_rng(seed)
    bound = 1.0 / math.sqrt(d)

    return AdapterWeights(
        W_Q=rng.uniform(-bound, bound, size=(d, d)),
        W_K=rng.uniform(-bound, bound, size=(d, d)),
        W_V=rng.uniform(-bound, bound, size=(d, d)),
        W_O=np.zeros((d, d)),
        model_name=model_name,
    )


def _stack(
    w: AdapterWeights, E_D: EmbeddingVector, candidates: list[EmbeddingVector]
) -> tuple[Matrix, Matrix]:
    if not len(candidates):
        throw("The adapter needs at least one candidate", ValidationError)

    d = w.dimension
    E = np.asarray(candidates, dtype=np.float64)

    if E_D.shape != (d,) or E.ndim != 2 or E.shape[1] != d:
        throw(
            f"Adapter of dimension {d} received vectors of shape {E_D.shape} and {E.shape}",
            DimensionMismatch,
        )

    return E, np.vstack([E_D[np.newaxis, :], E])


def _softmax_rows(scores: Matrix) -> Matrix:
    shifted = np.exp(scores - scores.max(axis=1, keepdims=True))
    return shifted / shifted.sum(axis=1, keepdims=True)


def _forward(
    w: AdapterWeights, E_D: EmbeddingVector, candidates: list[EmbeddingVector]
) -> _ForwardCache:
    E, M = _stack(w, E_D, candidates)
    Q = E @ w.W_Q.T
    K = M @ w.W_K.T
    V = M @ w.W_V.T
    A = _softmax_rows(Q @ K.T / math.sqrt(w.dimension))
    O = A @ V

    return _ForwardCache(E=E, M=M, Q=Q, K=K, V=V, A=A, O=O, out=E + O @ w.W_O.T)


def adapter_attention(
    w: AdapterWeights, E_D: EmbeddingVector, candidates: list[EmbeddingVector]
) -> Matrix:
    """Attention weights, one row per candidate over [E_D, e_c1, ..., e_ck]"""
    return _forward(w, E_D, candidates).A


def adapter_forward(
    w: AdapterWeights, E_D: EmbeddingVector, candidates: list[EmbeddingVector]
) -> list[EmbeddingVector]:
    """Recomputes candidate embeddings a_c; E_D itself is never adapted

    Args:
        w (AdapterWeights): The adapter
        E_D (EmbeddingVector): The document embedding
        candidates (list[EmbeddingVector]): Candidate embeddings e_c

    Returns:
        list[EmbeddingVector]: a_c per candidate, in input order
    """
    return list(_forward(w, E_D, candidates).out)


def _check_mask(relevant_mask: list[bool], k: int) -> NDArray[np.bool_]:
    mask = np.asarray(relevant_mask, dtype=bool)

    if mask.shape != (k,):
        throw(
            f"Relevant mask has {mask.size} entries for {k} candidates",
            DimensionMismatch,
        )

    if not mask.any():
        throw("At least one candidate must be relevant", NoRelevantCandidates)

    return mask


def _loss_and_output_gradient(
    cache: _ForwardCache,
    E_D: EmbeddingVector,
    mask: NDArray[np.bool_],
    cfg: TrainConfig,
) -> tuple[float, Matrix]:
    d = E_D.shape[0]
    toward_document = cache.out - E_D
    from_original = cache.out - cache.E
    grad_out = np.zeros_like(cache.out)

    n_relevant = int(mask.sum())
    loss = cfg.lambda_relevant * float(np.mean(np.sum(toward_document[mask] ** 2, axis=1))) / d
    grad_out[mask] = cfg.lambda_relevant * 2.0 * toward_document[mask] / (d * n_relevant)

    n_anchor = mask.size - n_relevant
    if n_anchor:
        anchor = ~mask
        loss += cfg.lambda_anchor * float(np.mean(np.sum(from_original[anchor] ** 2, axis=1))) / d
        grad_out[anchor] = cfg.lambda_anchor * 2.0 * from_original[anchor] / (d * n_anchor)

    return loss, grad_out


def adapter_loss(
    w: AdapterWeights,
    E_D: EmbeddingVector,
    candidates: list[EmbeddingVector],
    relevant_mask: list[bool],
    cfg: TrainConfig,
) -> float:
    """Relevant candidates toward E_D plus non-relevant candidates anchored in place.

    L = λ_rel · mean_{c∈RC} MSE(E_D, a_c) + λ_anchor · mean_{c∉RC} MSE(a_c, e_c),
    MSE averaging over the d dimensions; the anchor term is 0 when every
    candidate is relevant.

    Args:
        w (AdapterWeights): The adapter
        E_D (EmbeddingVector): The document embedding
        candidates (list[EmbeddingVector]): Candidate embeddings
        relevant_mask (list[bool]): True for candidates in RC
        cfg (TrainConfig): Loss weights

    Returns:
        float: The non-negative loss
    """
    cache = _forward(w, E_D, candidates)
    mask = _check_mask(relevant_mask, cache.E.shape[0])

    return _loss_and_output_gradient(cache, E_D, mask, cfg)[0]


def _loss_and_gradient(
    w: AdapterWeights,
    E_D: EmbeddingVector,
    candidates: list[EmbeddingVector],
    relevant_mask: list[bool],
    cfg: TrainConfig,
) -> tuple[float, AdapterGradients]:
    cache = _forward(w, E_D, candidates)
    mask = _check_mask(relevant_mask, cache.E.shape[0])
    loss, grad_out = _loss_and_output_gradient(cache, E_D, mask, cfg)
    scale = math.sqrt(w.dimension)

    # out = E + O W_O^T
    grad_W_O = grad_out.T @ cache.O
    grad_O = grad_out @ w.W_O

    # O = A V
    grad_A = grad_O @ cache.V.T
    grad_V = cache.A.T @ grad_O

    # A = softmax(S), row-wise
    grad_S = cache.A * (grad_A - np.sum(grad_A * cache.A, axis=1, keepdims=True))

    # S = Q K^T / sqrt(d)
    grad_Q = grad_S @ cache.K / scale
    grad_K = grad_S.T @ cache.Q / scale

    return loss, AdapterGradients(
        W_Q=grad_Q.T @ cache.E,
        W_K=grad_K.T @ cache.M,
        W_V=grad_V.T @ cache.M,
        W_O=grad_W_O,
    )


def adapter_gradient(
    w: AdapterWeights,
    E_D: EmbeddingVector,
    candidates: list[EmbeddingVector],
    relevant_mask: list[bool],
    cfg: TrainConfig,
) -> AdapterGradients:
    """Exact gradient of adapter_loss with respect to the four weight matrices

    Args:
        w (AdapterWeights): The adapter
        E_D (EmbeddingVector): The document embedding
        candidates (list[EmbeddingVector]): Candidate embeddings
        relevant_mask (list[bool]): True for candidates in RC
        cfg (TrainConfig): Loss weights

    Returns:
        AdapterGradients: ∂L/∂W for W_Q, W_K, W_V and W_O
    """
    return _loss_and_gradient(w, E_D, candidates, relevant_mask, cfg)[1]


@dataclass(frozen=True)
class _PreparedPair:
    document_id: str
    E_D: EmbeddingVector
    candidates: list[EmbeddingVector]
    relevant_mask: list[bool]


def _prepare_pair(
    pair: TrainingPair,
    embedder: Embedder,
    ngram_range: NgramRange,
    stopwords: frozenset[str],
) -> tuple[_PreparedPair, int]:
    relevant = sorted(
        {normalize_phrase(phrase) for phrase in pair.relevant_phrases} - {""}
    )

    if not relevant:
        throw(
            f"Training pair {pair.document.id!r} has no relevant phrases",
            NoRelevantCandidates,
        )

    surfaces = extract_candidates(
        pair.document, ngram_range, stopwords, allow_empty=True
    ).surfaces
    missing = [phrase for phrase in relevant if phrase not in set(surfaces)]
    surfaces = surfaces + missing

    E_D = embedder.embed_one(pair.document.text)
    relevant_set = set(relevant)

    return (
        _PreparedPair(
            document_id=pair.document.id,
            E_D=E_D,
            candidates=embedder.embed(surfaces),
            relevant_mask=[surface in relevant_set for surface in surfaces],
        ),
        len(missing),
    )


def train_adapter(
    pairs: list[TrainingPair],
    embedder: Embedder,
    ngram_range: NgramRange,
    stopwords: frozenset[str],
    cfg: TrainConfig,
    weights: AdapterWeights | None = None,
) -> TrainResult:
    """Trains the adapter with per-pair SGD over seeded shuffles of the pairs.

    Relevant phrases missing from a document's extracted candidates are
    injected as extra candidates so every relevant phrase has an embedding.

    Args:
        pairs (list[TrainingPair]): The (document, relevant phrases) samples
        embedder (Embedder): The embedding backend
        ngram_range (NgramRange): Candidate extraction range
        stopwords (frozenset[str]): Candidate extraction stopwords
        cfg (TrainConfig): Optimisation settings
        weights (AdapterWeights | None, optional): Starting weights; a fresh
            seeded adapter when omitted.

    Returns:
        TrainResult: Final weights and the mean loss of every epoch
    """
    if not pairs:
        throw("Training needs at least one (document, keywords) pair", ValidationError)

    prepared, injected = [], 0
    for pair in pairs:
        prepared_pair, missing = _prepare_pair(pair, embedder, ngram_range, stopwords)
        prepared.append(prepared_pair)
        injected += missing

    if injected:
        keyword_logger.info("Injected %s relevant phrase(s) missing from candidates", injected)

    w = weights.copy() if weights is not None else init_adapter(
        embedder.dimension, cfg.rng_seed, embedder.model_name
    )
    w.validate_dimension(embedder.dimension)

    rng = np.random.default_rng(cfg.rng_seed)
    history: list[float] = []

    for epoch in range(1, cfg.epochs + 1):
        epoch_losses = []

        for index in rng.permutation(len(prepared)):
            sample = prepared[index]
            loss, gradients = _loss_and_gradient(
                w, sample.E_D, sample.candidates, sample.relevant_mask, cfg
            )
            epoch_losses.append(loss)

            for name, gradient in gradients.matrices().items():
                getattr(w, name)[...] -= cfg.learning_rate * gradient

        mean_loss = float(np.mean(epoch_losses))

        if not math.isfinite(mean_loss):
            throw(
                f"Training diverged at epoch {epoch}; lower --lr",
                ValidationError,
                title="Training Error",
            )

        history.append(mean_loss)
        keyword_logger.info("epoch %s mean loss %.10g", epoch, mean_loss)

    return TrainResult(weights=w, loss_history=history, injected_phrases=injected)
