"""Precision, recall and F-score of extracted keywords against gold sets"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from nltk.stem import PorterStemmer

from ..constants import MODE_LABELS, MODES
from ..corpus.protocol import LabeledCorpus
from ..embeddings.backends import Embedder
from ..exceptions import EmptyGold, ParseError, ValidationError
from ..extraction.candidates import extract_candidates, normalize_phrase
from ..handlers import throw
from ..logger import keyword_logger
from ..pipeline import PipelineConfig, rank_candidates

REPORT_FIELDS = ("mode", "k", "macro_precision", "macro_recall", "macro_f")


@dataclass(frozen=True)
class DocumentScore:
    document_id: str
    precision: float
    recall: float
    f_score: float


@dataclass(frozen=True)
class EvalReport:
    mode: str
    k: int
    per_document: tuple[DocumentScore, ...]
    flagged: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            throw(f"Unknown mode {self.mode!r}", ValidationError)

        if not self.per_document:
            throw("A report needs at least one scored document", ValidationError)

    def _macro(self, metric: str) -> float:
        return float(np.mean([getattr(score, metric) for score in self.per_document]))

    @property
    def macro_precision(self) -> float:
        return self._macro("precision")

    @property
    def macro_recall(self) -> float:
        return self._macro("recall")

    @property
    def macro_f(self) -> float:
        return self._macro("f_score")


@lru_cache(maxsize=None)
def _stemmer() -> PorterStemmer:
    return PorterStemmer()


def _stem_phrase(phrase: str) -> str:
    return " ".join(_stemmer().stem(word) for word in phrase.split())


def evaluate_document(
    extracted: list[str], gold: set[str] | frozenset[str], stem: bool = False
) -> tuple[float, float, float]:
    """Scores one document's extraction by exact normalized match.

    Args:
        extracted (list[str]): Extracted phrases
        gold (set[str] | frozenset[str]): The gold keywords, non-empty
        stem (bool, optional): Compare Porter-stemmed words instead. Defaults to False.

    Returns:
        tuple[float, float, float]: precision, recall, F-score
    """
    matched_gold = {normalize_phrase(phrase) for phrase in gold} - {""}

    if not matched_gold:
        throw("Cannot score against an empty gold set", EmptyGold)

    matched_extracted = set(dict.fromkeys(normalize_phrase(phrase) for phrase in extracted))
    matched_extracted.discard("")

    if stem:
        matched_gold = {_stem_phrase(phrase) for phrase in matched_gold}
        matched_extracted = {_stem_phrase(phrase) for phrase in matched_extracted}

    true_positives = len(matched_extracted & matched_gold)
    precision = true_positives / len(matched_extracted) if matched_extracted else 0.0
    recall = true_positives / len(matched_gold)

    if precision + recall == 0:
        return precision, recall, 0.0

    return precision, recall, 2 * precision * recall / (precision + recall)


def evaluate_corpus(
    corpus: LabeledCorpus,
    embedder: Embedder,
    config: PipelineConfig,
    stem: bool = False,
) -> EvalReport:
    """Runs the pipeline over every document and macro-averages the scores.

    Documents without candidates score zero and are flagged in the report.

    Args:
        corpus (LabeledCorpus): The documents to evaluate, usually the held-out split
        embedder (Embedder): The embedding backend
        config (PipelineConfig): Mode, adaptation inputs and cutoff k
        stem (bool, optional): Stemmed matching. Defaults to False.

    Returns:
        EvalReport: Per-document and macro scores, in corpus order
    """
    scores, flagged = [], []

    for entry in corpus.entries:
        document = entry.document
        candidates = extract_candidates(
            document,
            config.extraction.ngram_range,
            config.extraction.stopwords,
            allow_empty=True,
        )

        if not len(candidates):
            keyword_logger.warning("Document %s has no candidates; scored as 0", document.id)
            flagged.append(document.id)
            scores.append(DocumentScore(document.id, 0.0, 0.0, 0.0))

            continue

        keywords = rank_candidates(document, candidates, embedder, config)
        precision, recall, f_score = evaluate_document(
            [keyword.phrase for keyword in keywords], entry.gold_keywords, stem=stem
        )
        scores.append(DocumentScore(document.id, precision, recall, f_score))

    return EvalReport(
        mode=config.mode,
        k=config.top_k,
        per_document=tuple(scores),
        flagged=tuple(flagged),
    )


def report_line(report: EvalReport) -> str:
    """One machine-readable JSON object per report"""
    return json.dumps(
        {
            "mode": report.mode,
            "k": report.k,
            "macro_precision": report.macro_precision,
            "macro_recall": report.macro_recall,
            "macro_f": report.macro_f,
        }
    )


def load_report_lines(text: str) -> list[dict]:
    """Parses the machine-readable lines out of rendered report output

    Args:
        text (str): Output of render_report, or bare report lines

    Returns:
        list[dict]: One object per report line, in order
    """
    rows = []

    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.startswith("{"):
            continue

        try:
            row = json.loads(line)

        except json.JSONDecodeError as error:
            throw(f"Report line {line_number} is not valid JSON: {error.msg}", ParseError)

        if not isinstance(row, dict) or any(key not in row for key in REPORT_FIELDS):
            throw(f"Report line {line_number} lacks {', '.join(REPORT_FIELDS)}", ParseError)

        rows.append(row)

    return rows


def _percent(value: float) -> str:
    return f"{value * 100:.3f}"


def render_report(reports: list[EvalReport]) -> str:
    """Renders the comparison table followed by one JSON line per report.

    Rows follow the fixed mode order; metrics are macro-averaged percentages.

    Args:
        reports (list[EvalReport]): At least one report

    Returns:
        str: The table text
    """
    if not reports:
        throw("Nothing to render: no reports were produced", ValidationError)

    ordered = sorted(reports, key=lambda report: MODES.index(report.mode))
    header = ("Model", "Precision", "Recall", "F-Score")
    rows = [
        (
            MODE_LABELS[report.mode],
            _percent(report.macro_precision),
            _percent(report.macro_recall),
            _percent(report.macro_f),
        )
        for report in ordered
    ]

    label_width = max(len(row[0]) for row in [header, *rows])
    widths = [
        max(len(row[column]) for row in [header, *rows]) for column in range(1, 4)
    ]

    def format_row(row: tuple[str, str, str, str]) -> str:
        cells = [row[0].ljust(label_width)]
        cells.extend(cell.rjust(width) for cell, width in zip(row[1:], widths))
        return " | ".join(cells)

    documents = len(ordered[0].per_document)
    lines = [
        f"Macro-averaged over {documents} document(s), top {ordered[0].k} keywords",
        format_row(header),
        "-+-".join("-" * width for width in [label_width, *widths]),
        *(format_row(row) for row in rows),
        "",
        *(report_line(report) for report in ordered),
    ]

    return "\n".join(lines) + "\n"
