"""Shared exception types with stable machine-readable codes."""

from __future__ import annotations

from typing import Any


class MapAlignError(Exception):
    """Base error; `code` is stable across releases, `detail` is free-form."""

    code = "error"

    def __init__(self, message: str, detail: Any = None):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def to_payload(self) -> dict:
        return {"code": self.code, "message": self.message, "detail": self.detail}


class IngestError(MapAlignError):
    code = "ingest-error"


class DimensionMismatchError(IngestError):
    code = "dimension-mismatch"


class NonFiniteValueError(IngestError):
    code = "non-finite-value"


class DuplicateItemError(IngestError):
    code = "duplicate-item"


class InsufficientOverlapError(MapAlignError):
    code = "insufficient-overlap"


class DegenerateProjectionError(MapAlignError):
    code = "degenerate-projection"


class MissingAttributeError(MapAlignError):
    code = "missing-attribute"


class MismatchedUniverseError(MapAlignError):
    code = "mismatched-universe"


class CoincidentNodesError(MapAlignError):
    code = "coincident-nodes"


class InvalidParameterError(MapAlignError):
    code = "invalid-parameter"


class UnknownSelectorError(MapAlignError):
    code = "unknown-selector"


class SummarizerError(MapAlignError):
    code = "summarizer-upstream"
