"""Exception types raised by the evaluation engine."""

from __future__ import annotations


class DatasetError(Exception):
    """Base class for dataset ingestion and validation failures."""


class ParseError(DatasetError):
    """Malformed input file. Carries the byte offset of the failure when known."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (byte offset {offset})")
        self.offset = offset


class ValidationError(DatasetError):
    """Input violates a structural invariant (negative box size, bad range, ...)."""


class UnknownReferenceError(DatasetError):
    """An input record references an id that does not exist."""

    def __init__(self, kind: str, ref_id: object):
        super().__init__(f"unknown {kind} id: {ref_id!r}")
        self.kind = kind
        self.ref_id = ref_id


class QueryError(Exception):
    """A distribution/matrix/subset query names an unknown variable or is malformed."""


class UndefinedConditionalError(QueryError):
    """Conditional probability requested against an event of probability zero."""


class EmptySelectionError(Exception):
    """A grid layout was requested for an empty selection."""
