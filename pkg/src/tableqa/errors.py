"""Exception taxonomy shared across the pipeline."""


class TableQAError(Exception):
    """Base class for all engine errors."""


class EmptyTableError(TableQAError):
    """Table has no columns or no body rows."""


class RaggedRowsError(TableQAError):
    """Row width differs from the header and padding is disabled."""


class DuplicateIdError(TableQAError):
    """Table id or question id repeated within a corpus/question set."""


class NotFoundError(TableQAError):
    """Requested table id is not in the store."""


class ManifestExistsError(TableQAError):
    """Ingest target already holds a corpus and overwrite is off."""


class CorruptRecordError(TableQAError):
    """Corpus line is not a well-formed table record."""


class EmptyQueryError(TableQAError):
    """Question tokenizes to nothing (e.g. stopwords only)."""


class ScorerUnavailableError(TableQAError):
    """Remote scorer unreachable, timed out, or broke protocol."""

    def __init__(self, message, qid=None, table_id=None):
        context = "".join(
            f" [{k}={v}]" for k, v in (("qid", qid), ("table_id", table_id)) if v
        )
        super().__init__(message + context)
        self.qid = qid
        self.table_id = table_id


class MalformedResponseError(TableQAError):
    """Scorer response violates the wire contract (shape or range)."""


class CacheMissError(TableQAError):
    """Replay cache has no entry for the requested key."""


class EmptyScoresError(TableQAError):
    """Row/column probability vectors are empty."""


class MissingScoresError(TableQAError):
    """A pooled table has no RowColumnScores attached."""


class ShapeMismatchError(TableQAError):
    """Score vector lengths disagree with the table dimensions."""


class ParseError(TableQAError):
    """Malformed qrels/run file line."""

    def __init__(self, message, line_number):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class NoRelevantError(TableQAError):
    """Query has no positive relevance grade; excluded from averages."""


class StoreError(TableQAError):
    """Store missing, unreadable, or inconsistent."""
