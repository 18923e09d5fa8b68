"""Maps defaults and fixed names used across the app to variable names"""

from typing import Final

# Extraction
DEFAULT_NGRAM_MIN: Final[int] = 1
DEFAULT_NGRAM_MAX: Final[int] = 1
STOPWORDS_LANGUAGE: Final[str] = "english"
STOPWORDS_FIXTURE_NAME: Final[str] = "english_stopwords.txt"

# Embedding backends
BACKEND_PRECOMPUTED: Final[str] = "file"
BACKEND_HTTP: Final[str] = "http"
BACKEND_TEST: Final[str] = "test"
BACKEND_KINDS: Final[tuple[str, ...]] = (BACKEND_TEST, BACKEND_PRECOMPUTED, BACKEND_HTTP)
DEFAULT_BACKEND: Final[str] = BACKEND_TEST
DEFAULT_DIMENSION: Final[int] = 384
DEFAULT_MODEL_NAME: Final[str] = "all-MiniLM-L6-v2"
DEFAULT_RNG_SEED: Final[int] = 0
MAX_RNG_SEED: Final[int] = 2**63 - 1
DEFAULT_HTTP_BATCH_SIZE: Final[int] = 64
DEFAULT_HTTP_TIMEOUT: Final[float] = 30.0
DEFAULT_MAX_EMBED_CHARS: Final[int] = 20_000
EMBED_ROUTE_PATH: Final[str] = "/embed"

# Few-shot adapter
ADAPTER_FORMAT_VERSION: Final[int] = 1
DEFAULT_LEARNING_RATE: Final[float] = 1e-3
DEFAULT_EPOCHS: Final[int] = 50
DEFAULT_LAMBDA_RELEVANT: Final[float] = 1.0
DEFAULT_LAMBDA_ANCHOR: Final[float] = 1.0

# Zero-shot reweighting
DEFAULT_ALPHA: Final[float] = 0.3

# Ranking
DEFAULT_TOP_K: Final[int] = 10
DEFAULT_DIVERSITY: Final[float] = 0.0

# Corpus protocol
DEFAULT_P: Final[float] = 0.10

# Evaluation modes, in report order
MODE_BENCHMARK: Final[str] = "benchmark"
MODE_ZERO_SHOT: Final[str] = "zero-shot"
MODE_FEW_SHOT: Final[str] = "few-shot"
MODE_COMBINED: Final[str] = "zero+few-shot"
MODES: Final[tuple[str, ...]] = (
    MODE_BENCHMARK,
    MODE_ZERO_SHOT,
    MODE_FEW_SHOT,
    MODE_COMBINED,
)
MODE_LABELS: Final[dict[str, str]] = {
    MODE_BENCHMARK: "Benchmark",
    MODE_ZERO_SHOT: "Zero-Shot",
    MODE_FEW_SHOT: "Few-Shot",
    MODE_COMBINED: "Zero-Shot & Few-Shot",
}
FEW_SHOT_MODES: Final[frozenset[str]] = frozenset({MODE_FEW_SHOT, MODE_COMBINED})
ZERO_SHOT_MODES: Final[frozenset[str]] = frozenset({MODE_ZERO_SHOT, MODE_COMBINED})

# Exit codes
EXIT_OK: Final[int] = 0
EXIT_CONFIG_ERROR: Final[int] = 2
EXIT_BACKEND_ERROR: Final[int] = 3
EXIT_EMPTY_CANDIDATES: Final[int] = 4
EXIT_EMPTY_SELECTION: Final[int] = 5

# Logging
LOG_DIRECTORY_ENV_VAR: Final[str] = "DOMAIN_KEYWORDS_LOG_DIR"
