"""The `domain-keywords` executable: extract, adapt, eval and popular"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Callable, NoReturn

from ... import __version__
from ..adaptation.adapter_store import load_adapter, save_adapter
from ..adaptation.few_shot import (
    AdapterWeights,
    TrainConfig,
    TrainingPair,
    TrainResult,
    train_adapter,
)
from ..adaptation.zero_shot import SeedSet, build_seed_set, load_seed_words
from ..constants import (
    BACKEND_KINDS,
    DEFAULT_DIMENSION,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    FEW_SHOT_MODES,
    MAX_RNG_SEED,
    MODE_BENCHMARK,
    MODE_COMBINED,
    MODE_FEW_SHOT,
    MODE_ZERO_SHOT,
    MODES,
    ZERO_SHOT_MODES,
)
from ..corpus.protocol import (
    LabeledCorpus,
    ProtocolConfig,
    auto_seed_words,
    load_corpus,
    popular_keywords,
    popular_keywords_with_frequency,
    select_fewshot_documents,
    split_corpus,
)
from ..embeddings.backends import Embedder, EmbedderConfig, create_embedder
from ..evaluation.harness import evaluate_corpus, render_report
from ..exceptions import EmptySelection, ParseError
from ..extraction.candidates import Document, NgramRange, load_stopwords
from ..handlers import handle_errors, throw
from ..logger import keyword_logger
from ..pipeline import ExtractionConfig, PipelineConfig, extract_keywords
from .config import CliConfig, resolve_config


class CliArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as a single diagnostic line"""

    def error(self, message: str) -> NoReturn:
        keyword_logger.error("Usage Error: %s", message)
        raise SystemExit(EXIT_CONFIG_ERROR)


def _add_backend_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("embedding backend")
    group.add_argument("--backend", choices=BACKEND_KINDS, default=None)
    group.add_argument("--store", default=None, help="JSON Lines embedding store")
    group.add_argument("--endpoint", default=None, help="Base URL of the /embed service")
    group.add_argument(
        "--dim",
        type=int,
        default=None,
        help=f"Embedding dimension ({DEFAULT_DIMENSION} by default; a --store fixes its own)",
    )
    group.add_argument(
        "--seed", type=int, default=None, help=f"Hashing and training seed in [0, {MAX_RNG_SEED}]"
    )
    group.add_argument("--model-name", default=None)
    group.add_argument("--timeout", type=float, default=None, help="HTTP timeout in seconds")


def _add_extraction_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("candidate extraction")
    group.add_argument("--ngram-min", type=int, default=None)
    group.add_argument("--ngram-max", type=int, default=None)
    group.add_argument(
        "--stopwords", default=None, help="Stopword file (nltk English list by default)"
    )


def _add_ranking_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("ranking")
    group.add_argument("--top-k", type=int, default=None)
    group.add_argument("--diversity", type=float, default=None, help="MMR diversity, 0 disables")


def _add_seed_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("zero-shot seeds")
    group.add_argument("--alpha", type=float, default=None, help="Regularizer in [0, 1]")
    group.add_argument("--seed-words", nargs="+", action="extend", default=None, metavar="W")
    group.add_argument("--seed-words-file", default=None)


def _add_protocol_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--p", type=float, default=None, help="Popularity threshold and few-shot cap"
    )


def _add_training_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("few-shot training")
    group.add_argument("--epochs", type=int, default=None)
    group.add_argument("--lr", type=float, default=None)
    group.add_argument("--lambda-relevant", type=float, default=None)
    group.add_argument("--lambda-anchor", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = CliArgumentParser(
        prog="domain-keywords",
        description="Domain-adaptive keyword extraction",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = CliArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="JSON file of default settings")
    _add_backend_flags(common)
    _add_extraction_flags(common)

    extract = subparsers.add_parser(
        "extract", parents=[common], help="Rank the keywords of one document"
    )
    extract.add_argument("input", nargs="?", default="-", help="Document file, - for stdin")
    _add_ranking_flags(extract)
    _add_seed_flags(extract)
    extract.add_argument("--adapter", default=None, help="Trained adapter weights")

    adapt = subparsers.add_parser(
        "adapt", parents=[common], help="Train an adapter on the popular-keyword documents"
    )
    adapt.add_argument("input", help="JSON Lines corpus")
    _add_protocol_flags(adapt)
    _add_training_flags(adapt)
    adapt.add_argument("--output", default=None, help="Where to write the adapter weights")

    evaluate = subparsers.add_parser(
        "eval", parents=[common], help="Compare extraction modes on a labeled corpus"
    )
    evaluate.add_argument("input", help="JSON Lines corpus")
    _add_ranking_flags(evaluate)
    _add_seed_flags(evaluate)
    _add_protocol_flags(evaluate)
    _add_training_flags(evaluate)
    evaluate.add_argument("--adapter", default=None, help="Use these weights instead of training")
    evaluate.add_argument("--modes", default=None, help=f"Comma list of {','.join(MODES)}")
    evaluate.add_argument("--eval-on-train", action="store_true", default=None)
    evaluate.add_argument("--stem", action="store_true", default=None)

    popular = subparsers.add_parser(
        "popular", parents=[common], help="List gold keywords above the popularity threshold"
    )
    popular.add_argument("input", help="JSON Lines corpus")
    _add_protocol_flags(popular)

    return parser


def _embedder(config: CliConfig) -> Embedder:
    return create_embedder(
        EmbedderConfig(
            backend_kind=config.backend,
            dimension=config.dim,
            model_name=config.model_name,
            endpoint=config.endpoint,
            seed=config.seed,
            store_path=config.store,
            timeout=config.timeout,
        )
    )


def _extraction(config: CliConfig) -> ExtractionConfig:
    return ExtractionConfig(
        ngram_range=NgramRange(config.ngram_min, config.ngram_max),
        stopwords=load_stopwords(config.stopwords),
    )


def _train_config(config: CliConfig) -> TrainConfig:
    return TrainConfig(
        learning_rate=config.lr,
        epochs=config.epochs,
        lambda_relevant=config.lambda_relevant,
        lambda_anchor=config.lambda_anchor,
        rng_seed=config.seed,
    )


def _flag_seed_words(config: CliConfig) -> list[str]:
    if config.seed_words_file is not None:
        return load_seed_words(config.seed_words_file)

    return list(config.seed_words)


def _loaded_adapter(config: CliConfig, embedder: Embedder) -> AdapterWeights:
    weights = load_adapter(config.adapter)
    weights.validate_dimension(embedder.dimension)

    return weights


def _read_document(source: str) -> Document:
    try:
        if source == "-":
            return Document(id="stdin", text=sys.stdin.read())

        return Document(id=Path(source).name, text=Path(source).read_text(encoding="utf-8"))

    except (OSError, UnicodeDecodeError) as error:
        throw(f"Could not read document {source}: {error}", ParseError)


def cmd_extract(config: CliConfig) -> int:
    """Prints `rank<TAB>phrase<TAB>score` for the top keywords of one document.

    The mode follows the flags: an adapter enables few-shot, seed words
    enable zero-shot, and both together run the combined mode.
    """
    document = _read_document(config.input)
    embedder = _embedder(config)
    adapter = _loaded_adapter(config, embedder) if config.adapter else None
    seeds = (
        build_seed_set(_flag_seed_words(config), embedder, config.alpha)
        if config.has_seed_words
        else None
    )
    mode = {
        (False, False): MODE_BENCHMARK,
        (False, True): MODE_ZERO_SHOT,
        (True, False): MODE_FEW_SHOT,
        (True, True): MODE_COMBINED,
    }[(adapter is not None, seeds is not None)]

    keywords = extract_keywords(
        document,
        embedder,
        PipelineConfig(
            mode=mode,
            adapter=adapter,
            seeds=seeds,
            top_k=config.top_k,
            diversity=config.diversity,
            extraction=_extraction(config),
        ),
    )

    for rank, keyword in enumerate(keywords, start=1):
        print(f"{rank}\t{keyword.phrase}\t{keyword.score:.4f}")

    return EXIT_OK


def _select_pairs(corpus: LabeledCorpus, protocol: ProtocolConfig) -> list[TrainingPair]:
    pairs = select_fewshot_documents(corpus, popular_keywords(corpus, protocol), protocol)

    if not pairs:
        throw("No document was selected for few-shot training", EmptySelection)

    noun = "pair" if len(pairs) == 1 else "pairs"
    print(f"{len(pairs)} training {noun} selected", file=sys.stderr)

    return pairs


def _train(
    config: CliConfig,
    pairs: list[TrainingPair],
    embedder: Embedder,
    extraction: ExtractionConfig,
) -> TrainResult:
    return train_adapter(
        pairs,
        embedder,
        extraction.ngram_range,
        extraction.stopwords,
        _train_config(config),
    )


def cmd_adapt(config: CliConfig) -> int:
    """Trains an adapter on the protocol's few-shot documents and writes it to --output"""
    corpus = load_corpus(config.input)
    pairs = _select_pairs(corpus, ProtocolConfig(config.p))
    result = _train(config, pairs, _embedder(config), _extraction(config))

    save_adapter(result.weights, config.output)

    for epoch, loss in enumerate(result.loss_history, start=1):
        print(f"{epoch}\t{loss:.10g}")

    return EXIT_OK


def cmd_eval(config: CliConfig) -> int:
    """Evaluates the requested modes on the held-out split and prints the report.

    Few-shot modes train an adapter on the fly unless --adapter is given;
    zero-shot modes fall back to the popular keywords as seed words.
    """
    corpus = load_corpus(config.input)
    protocol = ProtocolConfig(config.p)
    embedder = _embedder(config)
    extraction = _extraction(config)

    pairs = _select_pairs(corpus, protocol)

    adapter = None
    if FEW_SHOT_MODES.intersection(config.modes):
        if config.adapter:
            adapter = _loaded_adapter(config, embedder)

        else:
            adapter = _train(config, pairs, embedder, extraction).weights

    seeds: SeedSet | None = None
    if ZERO_SHOT_MODES.intersection(config.modes):
        words = (
            _flag_seed_words(config)
            if config.has_seed_words
            else auto_seed_words(corpus, protocol)
        )
        seeds = build_seed_set(words, embedder, config.alpha)

    held_out = split_corpus(
        corpus, [pair.document.id for pair in pairs], config.eval_on_train
    )
    keyword_logger.info("Evaluating %s of %s documents", len(held_out), len(corpus))

    reports = [
        evaluate_corpus(
            held_out,
            embedder,
            PipelineConfig(
                mode=mode,
                adapter=adapter if mode in FEW_SHOT_MODES else None,
                seeds=seeds if mode in ZERO_SHOT_MODES else None,
                top_k=config.top_k,
                diversity=config.diversity,
                extraction=extraction,
            ),
            stem=config.stem,
        )
        for mode in MODES
        if mode in config.modes
    ]

    sys.stdout.write(render_report(reports))

    return EXIT_OK


def cmd_popular(config: CliConfig) -> int:
    """Prints `keyword<TAB>document_frequency` for every popular keyword"""
    corpus = load_corpus(config.input)

    for keyword, frequency in popular_keywords_with_frequency(
        corpus, ProtocolConfig(config.p)
    ):
        print(f"{keyword}\t{frequency}")

    return EXIT_OK


COMMANDS: dict[str, Callable[[CliConfig], int]] = {
    "extract": cmd_extract,
    "adapt": cmd_adapt,
    "eval": cmd_eval,
    "popular": cmd_popular,
}


def main(argv: list[str] | None = None) -> int:
    """Runs one subcommand and returns the process exit status

    Args:
        argv (list[str] | None, optional): Arguments without the program name.
            Defaults to sys.argv[1:].

    Returns:
        int: 0 on success, the failing error's exit code otherwise
    """
    parser = build_parser()

    try:
        args = parser.parse_args(argv)

    except SystemExit as exit_request:
        return exit_request.code if isinstance(exit_request.code, int) else EXIT_CONFIG_ERROR

    try:
        config = resolve_config(args)
        return COMMANDS[config.command](config)

    except Exception as error:
        return handle_errors(error)
