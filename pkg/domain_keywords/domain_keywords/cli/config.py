"""Command line configuration: flags, an optional JSON file and defaults, in that
order of precedence, validated before any pipeline work starts."""

from __future__ import annotations

import argparse
import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Callable

from ..constants import (
    BACKEND_HTTP,
    BACKEND_KINDS,
    BACKEND_PRECOMPUTED,
    DEFAULT_ALPHA,
    DEFAULT_BACKEND,
    DEFAULT_DIVERSITY,
    DEFAULT_EPOCHS,
    DEFAULT_HTTP_TIMEOUT,
    DEFAULT_LAMBDA_ANCHOR,
    DEFAULT_LAMBDA_RELEVANT,
    DEFAULT_LEARNING_RATE,
    DEFAULT_MODEL_NAME,
    DEFAULT_NGRAM_MAX,
    DEFAULT_NGRAM_MIN,
    DEFAULT_P,
    DEFAULT_RNG_SEED,
    DEFAULT_TOP_K,
    MAX_RNG_SEED,
    MODES,
)
from ..exceptions import ParseError, ValidationError
from ..handlers import throw
from ..utils import is_valid_url

# settings every run carries but that only come from the command line
POSITIONAL_FIELDS = frozenset({"command", "input", "config"})


def _parse_modes(value: Any) -> tuple[str, ...]:
    if isinstance(value, str):
        value = value.split(",")

    if not isinstance(value, (list, tuple)):
        raise TypeError(value)

    modes = [str(mode).strip() for mode in value if str(mode).strip()]
    return tuple(dict.fromkeys(modes))


def _parse_words(value: Any) -> tuple[str, ...]:
    if isinstance(value, str):
        return (value,)

    if not isinstance(value, (list, tuple)) or not all(isinstance(v, str) for v in value):
        raise TypeError(value)

    return tuple(value)


def _parse_bool(value: Any) -> bool:
    if not isinstance(value, bool):
        raise TypeError(value)

    return value


def _parse_int(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise TypeError(value)

    return int(value)


def _parse_float(value: Any) -> float:
    if isinstance(value, bool):
        raise TypeError(value)

    return float(value)


FIELD_PARSERS: dict[str, Callable[[Any], Any]] = {
    "backend": str,
    "store": str,
    "endpoint": str,
    "dim": _parse_int,
    "seed": _parse_int,
    "model_name": str,
    "timeout": _parse_float,
    "ngram_min": _parse_int,
    "ngram_max": _parse_int,
    "stopwords": str,
    "top_k": _parse_int,
    "alpha": _parse_float,
    "seed_words": _parse_words,
    "seed_words_file": str,
    "adapter": str,
    "p": _parse_float,
    "epochs": _parse_int,
    "lr": _parse_float,
    "lambda_relevant": _parse_float,
    "lambda_anchor": _parse_float,
    "modes": _parse_modes,
    "eval_on_train": _parse_bool,
    "diversity": _parse_float,
    "stem": _parse_bool,
    "output": str,
}


def flag_name(field_name: str) -> str:
    return "--" + field_name.replace("_", "-")


@dataclass(frozen=True)
class CliConfig:
    command: str
    input: str | None = None
    config: str | None = None
    backend: str = DEFAULT_BACKEND
    store: str | None = None
    endpoint: str | None = None
    dim: int | None = None
    seed: int = DEFAULT_RNG_SEED
    model_name: str = DEFAULT_MODEL_NAME
    timeout: float = DEFAULT_HTTP_TIMEOUT
    ngram_min: int = DEFAULT_NGRAM_MIN
    ngram_max: int = DEFAULT_NGRAM_MAX
    stopwords: str | None = None
    top_k: int = DEFAULT_TOP_K
    alpha: float = DEFAULT_ALPHA
    seed_words: tuple[str, ...] = field(default_factory=tuple)
    seed_words_file: str | None = None
    adapter: str | None = None
    p: float = DEFAULT_P
    epochs: int = DEFAULT_EPOCHS
    lr: float = DEFAULT_LEARNING_RATE
    lambda_relevant: float = DEFAULT_LAMBDA_RELEVANT
    lambda_anchor: float = DEFAULT_LAMBDA_ANCHOR
    modes: tuple[str, ...] = MODES
    eval_on_train: bool = False
    diversity: float = DEFAULT_DIVERSITY
    stem: bool = False
    output: str | None = None

    @property
    def has_seed_words(self) -> bool:
        return bool(self.seed_words) or self.seed_words_file is not None

    def validate(self) -> None:
        """Checks every setting against its domain; the first failure is raised"""
        error_title = "Invalid Flag"

        def require(condition: bool, message: str) -> None:
            if not condition:
                throw(message, ValidationError, title=error_title)

        require(
            self.backend in BACKEND_KINDS,
            f"--backend must be one of {', '.join(BACKEND_KINDS)}, got {self.backend!r}",
        )
        require(
            (self.backend == BACKEND_HTTP) == (self.endpoint is not None),
            "--endpoint is required by, and only accepted with, --backend http",
        )
        require(
            self.endpoint is None or is_valid_url(self.endpoint),
            f"--endpoint {self.endpoint!r} is not an http(s) URL",
        )
        require(
            self.backend != BACKEND_PRECOMPUTED or self.store is not None,
            "--store is required by --backend file",
        )
        require(self.dim is None or self.dim > 0, f"--dim must be positive, got {self.dim}")
        require(
            0 <= self.seed <= MAX_RNG_SEED,
            f"--seed must lie in [0, {MAX_RNG_SEED}], got {self.seed}",
        )
        require(self.timeout > 0, f"--timeout must be positive, got {self.timeout}")
        require(self.ngram_min >= 1, f"--ngram-min must be at least 1, got {self.ngram_min}")
        require(
            self.ngram_max >= self.ngram_min,
            f"--ngram-max ({self.ngram_max}) must not be below --ngram-min ({self.ngram_min})",
        )
        require(self.top_k >= 1, f"--top-k must be at least 1, got {self.top_k}")
        require(0.0 <= self.alpha <= 1.0, f"--alpha must lie in [0, 1], got {self.alpha}")
        require(0.0 < self.p < 1.0, f"--p must lie strictly between 0 and 1, got {self.p}")
        require(self.epochs >= 1, f"--epochs must be at least 1, got {self.epochs}")
        require(self.lr > 0, f"--lr must be positive, got {self.lr}")
        require(
            self.lambda_relevant >= 0,
            f"--lambda-relevant must be non-negative, got {self.lambda_relevant}",
        )
        require(
            self.lambda_anchor >= 0,
            f"--lambda-anchor must be non-negative, got {self.lambda_anchor}",
        )
        require(
            self.lambda_relevant + self.lambda_anchor > 0,
            "--lambda-relevant and --lambda-anchor cannot both be 0",
        )
        require(
            0.0 <= self.diversity <= 1.0,
            f"--diversity must lie in [0, 1], got {self.diversity}",
        )
        require(bool(self.modes), "--modes must name at least one mode")
        require(
            all(mode in MODES for mode in self.modes),
            f"--modes accepts {', '.join(MODES)}, got {','.join(self.modes)}",
        )
        require(
            not (self.seed_words and self.seed_words_file),
            "--seed-words and --seed-words-file are mutually exclusive",
        )
        require(
            self.command != "adapt" or self.output is not None,
            "--output is required by adapt",
        )


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Reads the JSON configuration file, keyed like the long flags

    Args:
        path (str | Path): The file named by --config

    Returns:
        dict[str, Any]: Setting name to parsed value
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))

    except (OSError, UnicodeDecodeError) as error:
        throw(f"Could not read --config {path}: {error}", ParseError)

    except json.JSONDecodeError as error:
        throw(f"--config {path} is not valid JSON: {error.msg}", ParseError)

    if not isinstance(data, dict):
        throw(f"--config {path} must hold a JSON object", ParseError)

    settings = {}
    for key, value in data.items():
        name = key.replace("-", "_")

        if name not in FIELD_PARSERS:
            throw(f"--config {path}: unknown setting {key!r}", ValidationError)

        if value is None:
            continue

        try:
            settings[name] = FIELD_PARSERS[name](value)

        except (TypeError, ValueError):
            throw(
                f"--config {path}: {key!r} has an invalid value {value!r} for {flag_name(name)}",
                ValidationError,
            )

    return settings


def resolve_config(args: argparse.Namespace) -> CliConfig:
    """Merges parsed flags over the configuration file over the defaults

    Args:
        args (argparse.Namespace): The parsed command line

    Returns:
        CliConfig: The validated configuration
    """
    config = CliConfig(
        command=args.command,
        input=getattr(args, "input", None),
        config=getattr(args, "config", None),
    )
    settings = load_config_file(config.config) if config.config else {}

    for setting in fields(CliConfig):
        if setting.name in POSITIONAL_FIELDS:
            continue

        value = getattr(args, setting.name, None)

        if value is not None:
            settings[setting.name] = FIELD_PARSERS[setting.name](value)

    config = replace(config, **settings)
    config.validate()

    return config
