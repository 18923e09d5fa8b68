"""Errors raised by the extraction pipeline.

Each error carries the exit status the CLI reports for it, so callers
never need to map exception types to codes themselves.
"""

from __future__ import annotations

from .constants import (
    EXIT_BACKEND_ERROR,
    EXIT_CONFIG_ERROR,
    EXIT_EMPTY_CANDIDATES,
    EXIT_EMPTY_SELECTION,
)


class DomainKeywordsError(Exception):
    """Base error"""

    exit_code: int = EXIT_CONFIG_ERROR
    default_title: str = "Error"

    def __init__(self, message: str = "", title: str | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.title = title or self.default_title


class ValidationError(DomainKeywordsError):
    default_title = "Validation Error"


class ParseError(DomainKeywordsError):
    default_title = "Parse Error"


class VersionMismatch(DomainKeywordsError):
    default_title = "Version Mismatch"


class DuplicateDocumentId(DomainKeywordsError):
    default_title = "Duplicate Document"


class EmptyCorpus(DomainKeywordsError):
    default_title = "Empty Corpus"


class EmptySeedSet(DomainKeywordsError):
    default_title = "Empty Seed Set"


class EmptyGold(DomainKeywordsError):
    default_title = "Empty Gold Set"


class NoRelevantCandidates(DomainKeywordsError):
    default_title = "No Relevant Candidates"


class DimensionMismatch(DomainKeywordsError):
    exit_code = EXIT_BACKEND_ERROR
    default_title = "Dimension Mismatch"


class BackendUnavailable(DomainKeywordsError):
    exit_code = EXIT_BACKEND_ERROR
    default_title = "Backend Unavailable"


class MissingEmbedding(DomainKeywordsError):
    exit_code = EXIT_BACKEND_ERROR
    default_title = "Missing Embedding"


class ZeroVector(DomainKeywordsError):
    exit_code = EXIT_BACKEND_ERROR
    default_title = "Zero Vector"


class EmptyCandidateSet(DomainKeywordsError):
    exit_code = EXIT_EMPTY_CANDIDATES
    default_title = "Empty Candidate Set"


class EmptySelection(DomainKeywordsError):
    exit_code = EXIT_EMPTY_SELECTION
    default_title = "Empty Selection"
