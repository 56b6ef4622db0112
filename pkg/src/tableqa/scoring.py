"""Row/column answer-containment scoring.

One contract, three implementations:

* SurrogateScorer - deterministic lexical overlap squashed through a
  sigmoid; stands in for a neural classifier at desk scale.
* RemoteScorer - HTTP client for an external model serving POST /score;
  batched, retried, and range-checked. The model itself never lives in
  this process.
* ReplayScorer - replays vectors from a persisted cache for bit-exact
  reruns without any scorer.

All implementations return per-row and per-column probabilities whose
lengths match the table; malformed vectors never escape this module.
"""

import json
import math
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import httpx

from .analyzer import tokenize
from .errors import (
    CacheMissError,
    MalformedResponseError,
    ScorerUnavailableError,
    ShapeMismatchError,
)
from .tables import Question, Table, serialize_column, serialize_row

SURROGATE_SLOPE = 6.0
SURROGATE_INTERCEPT = -3.0

REMOTE_BATCH_SIZE = 32
REMOTE_RETRIES = 3
REMOTE_BACKOFF_BASE = 0.2  # seconds, doubled per attempt
REMOTE_TIMEOUT = 10.0


@dataclass(frozen=True)
class RowColumnScores:
    table_id: str
    p_row: list[float]
    p_col: list[float]


def _check_shape(table: Table, p_row: list[float], p_col: list[float]) -> None:
    if len(p_row) != table.n_rows or len(p_col) != table.n_cols:
        raise ShapeMismatchError(
            f"table {table.id!r}: got {len(p_row)} row / {len(p_col)} column scores "
            f"for a {table.n_rows}x{table.n_cols} table"
        )
    for p in (*p_row, *p_col):
        if not 0.0 <= p <= 1.0:
            raise ShapeMismatchError(f"table {table.id!r}: probability {p} outside [0, 1]")


def surrogate_probability(
    question: str,
    sequence: str,
    a: float = SURROGATE_SLOPE,
    c: float = SURROGATE_INTERCEPT,
) -> float:
    """sigmoid(a * overlap + c) where overlap is the fraction of the
    question's distinct terms present in the sequence."""
    q_terms = set(tokenize(question))
    s_terms = set(tokenize(sequence))
    overlap = len(q_terms & s_terms) / max(1, len(q_terms))
    return 1.0 / (1.0 + math.exp(-(a * overlap + c)))


class SurrogateScorer:
    """Pure-function scorer; same inputs always give bitwise-same outputs."""

    def __init__(self, a: float = SURROGATE_SLOPE, c: float = SURROGATE_INTERCEPT):
        self.a = a
        self.c = c

    def score_table(self, question: Question, table: Table) -> RowColumnScores:
        p_row = [
            surrogate_probability(question.text, serialize_row(table, i), self.a, self.c)
            for i in range(table.n_rows)
        ]
        p_col = [
            surrogate_probability(question.text, serialize_column(table, j), self.a, self.c)
            for j in range(table.n_cols)
        ]
        scores = RowColumnScores(table_id=table.id, p_row=p_row, p_col=p_col)
        _check_shape(table, p_row, p_col)
        return scores


class ScoreCache:
    """Line-delimited score store keyed by (qid, table_id, kind).

    Appends are serialized; reads hit an in-memory map loaded at open, so
    a cache written by one process replays identically in another.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._entries: dict[tuple[str, str, str], list[float]] = {}
        self._lock = threading.Lock()
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    rec = json.loads(line)
                    key = (rec["qid"], rec["table_id"], rec["kind"])
                    self._entries[key] = [float(p) for p in rec["probabilities"]]

    def put(self, qid: str, table_id: str, kind: str, probabilities: list[float]) -> None:
        rec = {
            "qid": qid,
            "table_id": table_id,
            "kind": kind,
            "probabilities": list(probabilities),
        }
        with self._lock:
            self._entries[(qid, table_id, kind)] = rec["probabilities"]
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")

    def get(self, qid: str, table_id: str, kind: str) -> list[float]:
        try:
            return list(self._entries[(qid, table_id, kind)])
        except KeyError:
            raise CacheMissError(f"no cached {kind!r} scores for ({qid!r}, {table_id!r})") from None

    def __len__(self) -> int:
        return len(self._entries)


class ReplayScorer:
    """Serves previously cached vectors; any gap is a hard CacheMiss."""

    def __init__(self, cache: ScoreCache | str | Path):
        self.cache = cache if isinstance(cache, ScoreCache) else ScoreCache(cache)

    def score_table(self, question: Question, table: Table) -> RowColumnScores:
        p_row = self.cache.get(question.qid, table.id, "row")
        p_col = self.cache.get(question.qid, table.id, "col")
        _check_shape(table, p_row, p_col)
        return RowColumnScores(table_id=table.id, p_row=p_row, p_col=p_col)


class RecordingScorer:
    """Wraps any scorer and writes its outputs into a cache (cache-fill)."""

    def __init__(self, inner, cache: ScoreCache):
        self.inner = inner
        self.cache = cache

    def score_table(self, question: Question, table: Table) -> RowColumnScores:
        scores = self.inner.score_table(question, table)
        self.cache.put(question.qid, table.id, "row", scores.p_row)
        self.cache.put(question.qid, table.id, "col", scores.p_col)
        return scores


class RemoteScorer:
    """HTTP client for an external row/column classifier.

    Wire contract: POST {endpoint}/score with a JSON object
    {"question": str, "kind": "row"|"col", "sequences": [str, ...]} and a
    JSON response {"probabilities": [float, ...]} of equal length, each
    value in [0, 1].
    """

    def __init__(
        self,
        endpoint: str,
        timeout: float = REMOTE_TIMEOUT,
        batch_size: int = REMOTE_BATCH_SIZE,
        retries: int = REMOTE_RETRIES,
        backoff_base: float = REMOTE_BACKOFF_BASE,
        max_in_flight: int = 4,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.batch_size = batch_size
        self.retries = retries
        self.backoff_base = backoff_base
        self._semaphore = threading.Semaphore(max_in_flight)
        self._client = httpx.Client(timeout=timeout)

    def close(self) -> None:
        self._client.close()

    def score_batch(self, question: str, kind: str, sequences: list[str]) -> list[float]:
        """Score up to batch_size sequences in one round trip, retrying
        transient failures with exponential backoff."""
        payload = {"question": question, "kind": kind, "sequences": list(sequences)}
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff_base * (2 ** (attempt - 1)))
            try:
                with self._semaphore:
                    response = self._client.post(self.endpoint + "/score", json=payload)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = ScorerUnavailableError(f"server error {response.status_code}")
                continue
            if response.status_code != 200:
                raise ScorerUnavailableError(
                    f"scorer rejected request: HTTP {response.status_code}"
                )
            return self._parse(response, expected=len(sequences))
        raise ScorerUnavailableError(
            f"scorer at {self.endpoint} unavailable after {self.retries + 1} attempts: {last_error}"
        )

    @staticmethod
    def _parse(response: httpx.Response, expected: int) -> list[float]:
        try:
            body = response.json()
            probabilities = body["probabilities"]
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedResponseError(f"unparseable scorer response: {exc}") from exc
        if not isinstance(probabilities, list) or len(probabilities) != expected:
            raise MalformedResponseError(
                f"expected {expected} probabilities, got "
                f"{len(probabilities) if isinstance(probabilities, list) else type(probabilities).__name__}"
            )
        out = []
        for p in probabilities:
            if not isinstance(p, (int, float)) or not 0.0 <= float(p) <= 1.0:
                raise MalformedResponseError(f"probability {p!r} outside [0, 1]")
            out.append(float(p))
        return out

    def _score_sequences(self, question: str, kind: str, sequences: list[str]) -> list[float]:
        probabilities: list[float] = []
        for start in range(0, len(sequences), self.batch_size):
            probabilities.extend(
                self.score_batch(question, kind, sequences[start : start + self.batch_size])
            )
        return probabilities

    def score_table(self, question: Question, table: Table) -> RowColumnScores:
        rows = [serialize_row(table, i) for i in range(table.n_rows)]
        cols = [serialize_column(table, j) for j in range(table.n_cols)]
        try:
            p_row = self._score_sequences(question.text, "row", rows)
            p_col = self._score_sequences(question.text, "col", cols)
        except MalformedResponseError as exc:
            raise ScorerUnavailableError(
                f"protocol error: {exc}", qid=question.qid, table_id=table.id
            ) from exc
        except ScorerUnavailableError as exc:
            raise ScorerUnavailableError(str(exc), qid=question.qid, table_id=table.id) from exc
        _check_shape(table, p_row, p_col)
        return RowColumnScores(table_id=table.id, p_row=p_row, p_col=p_col)


def score_tables(scorer, question: Question, tables: Iterable[Table],
                 workers: int = 1) -> dict[str, RowColumnScores]:
    """Score a batch of tables, optionally with a bounded thread pool.

    Output is keyed by table id, so worker scheduling cannot affect
    downstream ranking.
    """
    tables = list(tables)
    if workers <= 1 or len(tables) <= 1:
        return {t.id: scorer.score_table(question, t) for t in tables}
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = pool.map(lambda t: scorer.score_table(question, t), tables)
        return {s.table_id: s for s in results}
