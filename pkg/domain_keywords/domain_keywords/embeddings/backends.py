"""Sentence embedding backends behind one interface"""

from __future__ import annotations

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..apis.api_builder import EndpointsBuilder
from ..constants import (
    BACKEND_HTTP,
    BACKEND_KINDS,
    BACKEND_PRECOMPUTED,
    BACKEND_TEST,
    DEFAULT_DIMENSION,
    DEFAULT_HTTP_BATCH_SIZE,
    DEFAULT_HTTP_TIMEOUT,
    DEFAULT_MAX_EMBED_CHARS,
    DEFAULT_MODEL_NAME,
    DEFAULT_RNG_SEED,
    EMBED_ROUTE_PATH,
)
from ..exceptions import (
    BackendUnavailable,
    DimensionMismatch,
    MissingEmbedding,
    ParseError,
    ValidationError,
)
from ..extraction.candidates import normalize_phrase
from ..handlers import throw
from ..logger import keyword_logger
from ..utils import is_valid_url
from .vectors import EmbeddingVector, as_vector, hash_embed


@dataclass(frozen=True)
class EmbedderConfig:
    backend_kind: str = BACKEND_TEST
    dimension: int | None = None
    model_name: str = DEFAULT_MODEL_NAME
    endpoint: str | None = None
    seed: int = DEFAULT_RNG_SEED
    store_path: str | None = None
    timeout: float = DEFAULT_HTTP_TIMEOUT
    batch_size: int = DEFAULT_HTTP_BATCH_SIZE

    def __post_init__(self) -> None:
        error_title = "Embedder Setup Error"

        if self.backend_kind not in BACKEND_KINDS:
            throw(
                f"Unknown backend {self.backend_kind!r}; expected one of {', '.join(BACKEND_KINDS)}",
                title=error_title,
            )

        if self.dimension is not None and self.dimension <= 0:
            throw(f"--dim must be positive, got {self.dimension}", title=error_title)

        if (self.backend_kind == BACKEND_HTTP) != (self.endpoint is not None):
            throw(
                "--endpoint is required by, and only accepted with, the http backend",
                title=error_title,
            )

        if self.endpoint is not None and not is_valid_url(self.endpoint):
            throw(f"--endpoint {self.endpoint!r} is not a valid URL", title=error_title)

        if self.backend_kind == BACKEND_PRECOMPUTED and not self.store_path:
            throw("--store is required by the file backend", title=error_title)

        if self.timeout <= 0 or self.batch_size <= 0:
            throw("Timeout and batch size must be positive", title=error_title)


class Embedder(ABC):
    """Maps texts to vectors of one fixed dimension"""

    def __init__(self, dimension: int, model_name: str = DEFAULT_MODEL_NAME) -> None:
        self.dimension = dimension
        self.model_name = model_name

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        """Embeds texts, preserving length and order

        Args:
            texts (list[str]): Non-empty list of non-blank texts

        Returns:
            list[EmbeddingVector]: One vector per text
        """
        if not texts:
            throw("embed() needs at least one text", ValidationError)

        for text in texts:
            if not normalize_phrase(text):
                throw("embed() received a blank text", ValidationError)

        vectors = self._embed(list(texts))

        if len(vectors) != len(texts):
            throw(
                f"Backend returned {len(vectors)} vectors for {len(texts)} texts",
                BackendUnavailable,
            )

        return [as_vector(vector, self.dimension) for vector in vectors]

    def embed_one(self, text: str) -> EmbeddingVector:
        return self.embed([text])[0]

    @abstractmethod
    def _embed(self, texts: list[str]) -> list[EmbeddingVector]:
        """Backend-specific embedding of validated texts"""


class HashEmbedder(Embedder):
    """Deterministic hashing backend for hermetic runs and tests"""

    def __init__(
        self,
        dimension: int = DEFAULT_DIMENSION,
        seed: int = DEFAULT_RNG_SEED,
        model_name: str = DEFAULT_MODEL_NAME,
    ) -> None:
        super().__init__(dimension, model_name)
        self.seed = seed

    def _embed(self, texts: list[str]) -> list[EmbeddingVector]:
        return [hash_embed(text, self.dimension, self.seed) for text in texts]


class PrecomputedEmbedder(Embedder):
    """Serves vectors from a read-only store keyed by normalized text"""

    def __init__(
        self,
        store: dict[str, EmbeddingVector],
        model_name: str = DEFAULT_MODEL_NAME,
    ) -> None:
        if not store:
            throw("The embedding store is empty", ParseError)

        dimension = next(iter(store.values())).shape[0]
        super().__init__(dimension, model_name)
        self._store = store

    def __len__(self) -> int:
        return len(self._store)

    def _embed(self, texts: list[str]) -> list[EmbeddingVector]:
        vectors = []

        for text in texts:
            key = normalize_phrase(text)

            if key not in self._store:
                throw(f"No precomputed embedding for {key[:60]!r}", MissingEmbedding)

            vectors.append(self._store[key])

        return vectors


class HttpEmbedder(Embedder):
    """Posts texts to a remote `/embed` service in concurrent batches"""

    def __init__(
        self,
        endpoint: str,
        dimension: int = DEFAULT_DIMENSION,
        model_name: str = DEFAULT_MODEL_NAME,
        timeout: float = DEFAULT_HTTP_TIMEOUT,
        batch_size: int = DEFAULT_HTTP_BATCH_SIZE,
    ) -> None:
        super().__init__(dimension, model_name)
        self.url = f"{endpoint.rstrip('/')}{EMBED_ROUTE_PATH}"
        self.timeout = timeout
        self.batch_size = batch_size

    def _truncate(self, text: str) -> str:
        if len(text) <= DEFAULT_MAX_EMBED_CHARS:
            return text

        keyword_logger.warning(
            "Truncating a %s character text to %s characters before embedding",
            len(text),
            DEFAULT_MAX_EMBED_CHARS,
        )
        return text[:DEFAULT_MAX_EMBED_CHARS]

    def _embed(self, texts: list[str]) -> list[EmbeddingVector]:
        batches = [
            [self._truncate(text) for text in texts[start : start + self.batch_size]]
            for start in range(0, len(texts), self.batch_size)
        ]
        results: list[list | None] = [None] * len(batches)

        def on_success(response: dict, index: int) -> None:
            embeddings = response.get("embeddings")

            if not isinstance(embeddings, list) or len(embeddings) != len(batches[index]):
                throw(
                    f"Malformed response from {self.url}: expected {len(batches[index])} embeddings",
                    BackendUnavailable,
                )

            results[index] = embeddings

        def on_error(status: int, response: dict | str, index: int) -> None:
            throw(
                f"Embedding service at {self.url} answered {status} for batch {index}",
                BackendUnavailable,
            )

        endpoints_builder = EndpointsBuilder()
        endpoints_builder.url = self.url
        endpoints_builder.headers = {"Content-Type": "application/json"}
        endpoints_builder.timeout = self.timeout
        endpoints_builder.payloads = [{"texts": batch} for batch in batches]
        endpoints_builder.success_callback = on_success
        endpoints_builder.error_callback = on_error

        endpoints_builder.make_remote_call()

        return [vector for batch in results for vector in batch or []]


def load_precomputed_store(path: str | Path) -> dict[str, EmbeddingVector]:
    """Loads a JSON Lines embedding store of `{"text": ..., "vector": [...]}` rows

    Args:
        path (str | Path): The store file

    Returns:
        dict[str, EmbeddingVector]: Normalized text to vector
    """
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()

    except (OSError, UnicodeDecodeError) as error:
        throw(f"Could not read embedding store {path}: {error}", ParseError)

    store: dict[str, EmbeddingVector] = {}
    dimension: int | None = None

    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue

        try:
            row = json.loads(line)
            text, values = row["text"], row["vector"]

        except (json.JSONDecodeError, KeyError, TypeError):
            throw(
                f"{path}:{line_number}: expected an object with 'text' and 'vector'",
                ParseError,
            )

        if not isinstance(text, str) or not isinstance(values, list) or not values:
            throw(f"{path}:{line_number}: malformed text or vector", ParseError)

        if dimension is None:
            dimension = len(values)

        if len(values) != dimension:
            throw(
                f"{path}:{line_number}: vector has {len(values)} values, store dimension is {dimension}",
                DimensionMismatch,
            )

        try:
            vector = np.asarray(values, dtype=np.float64)

        except (TypeError, ValueError):
            throw(f"{path}:{line_number}: vector values must be numbers", ParseError)

        if not np.all(np.isfinite(vector)):
            throw(f"{path}:{line_number}: vector has non-finite values", ParseError)

        vector.setflags(write=False)
        store[normalize_phrase(text)] = vector

    if not store:
        throw(f"Embedding store {path} has no rows", ParseError)

    return store


def create_embedder(config: EmbedderConfig) -> Embedder:
    """Builds the backend an EmbedderConfig names

    Args:
        config (EmbedderConfig): The validated configuration

    Returns:
        Embedder: The embedding backend
    """
    if config.backend_kind == BACKEND_PRECOMPUTED:
        embedder = PrecomputedEmbedder(
            load_precomputed_store(config.store_path), model_name=config.model_name
        )

        if config.dimension is not None and embedder.dimension != config.dimension:
            throw(
                f"--dim {config.dimension} does not match the "
                f"{embedder.dimension}-dimensional store {config.store_path}",
                DimensionMismatch,
            )

        return embedder

    if config.backend_kind == BACKEND_HTTP:
        return HttpEmbedder(
            config.endpoint,
            dimension=config.dimension or DEFAULT_DIMENSION,
            model_name=config.model_name,
            timeout=config.timeout,
            batch_size=config.batch_size,
        )

    return HashEmbedder(
        config.dimension or DEFAULT_DIMENSION, seed=config.seed, model_name=config.model_name
    )
