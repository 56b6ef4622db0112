"""Inverted index and Okapi BM25 candidate retrieval.

Tables are indexed as single whole-table documents. Scoring uses the
smoothed idf ln(1 + (N - df + 0.5)/(df + 0.5)), which is strictly
positive for every indexed term, so any table sharing a term with the
query outranks one sharing none.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .analyzer import tokenize
from .errors import EmptyQueryError, StoreError
from .tables import Question, Table, serialize_table_document

INDEX_FORMAT = "tableqa-index"
INDEX_VERSION = 1


@dataclass(frozen=True)
class Bm25Config:
    k1: float = 1.2
    b: float = 0.7
    pool_size: int = 300

    def __post_init__(self):
        if self.k1 <= 0:
            raise ValueError("k1 must be positive")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError("b must be in [0, 1]")
        if self.pool_size < 1:
            raise ValueError("pool_size must be >= 1")


@dataclass(frozen=True)
class RetrievalPool:
    qid: str
    entries: list[tuple[str, float]]  # (table id, bm25 score), descending

    def table_ids(self) -> list[str]:
        return [tid for tid, _ in self.entries]


@dataclass
class InvertedIndex:
    """Postings over table documents; immutable once built."""

    postings: dict[str, list[tuple[int, int]]] = field(default_factory=dict)
    doc_lengths: list[int] = field(default_factory=list)
    table_ids: list[str] = field(default_factory=list)
    avg_doc_length: float = 0.0

    @property
    def doc_count(self) -> int:
        return len(self.doc_lengths)

    def ordinal_of(self, table_id: str) -> int | None:
        try:
            return self.table_ids.index(table_id)
        except ValueError:
            return None

    def document_frequency(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def idf(self, term: str) -> float:
        df = self.document_frequency(term)
        if df == 0:
            return 0.0
        n = self.doc_count
        return math.log(1.0 + (n - df + 0.5) / (df + 0.5))


def build_index(tables: Iterable[Table]) -> InvertedIndex:
    """Index every table whose document yields at least one token.

    Ordinals follow iteration order, so building twice from the same
    store is byte-for-byte reproducible.
    """
    index = InvertedIndex()
    total = 0
    for table in tables:
        tokens = tokenize(serialize_table_document(table))
        if not tokens:
            continue  # unreachable by any query; keep out of N and avgdl
        ordinal = len(index.table_ids)
        index.table_ids.append(table.id)
        index.doc_lengths.append(len(tokens))
        total += len(tokens)
        counts: dict[str, int] = {}
        for tok in tokens:
            counts[tok] = counts.get(tok, 0) + 1
        for term, tf in counts.items():
            index.postings.setdefault(term, []).append((ordinal, tf))
    if index.doc_lengths:
        index.avg_doc_length = total / len(index.doc_lengths)
    return index


def _tf_component(tf: int, dl: int, cfg: Bm25Config, avgdl: float) -> float:
    return tf * (cfg.k1 + 1.0) / (tf + cfg.k1 * (1.0 - cfg.b + cfg.b * dl / avgdl))


def bm25_score(index: InvertedIndex, cfg: Bm25Config, query: list[str], ordinal: int) -> float:
    """BM25 of one document for a tokenized query; each query occurrence
    of a term contributes separately (bag semantics)."""
    dl = index.doc_lengths[ordinal]
    score = 0.0
    for term in query:
        plist = index.postings.get(term)
        if not plist:
            continue
        tf = next((f for o, f in plist if o == ordinal), 0)
        if tf == 0:
            continue
        score += index.idf(term) * _tf_component(tf, dl, cfg, index.avg_doc_length)
    return score


def retrieve_pool(index: InvertedIndex, cfg: Bm25Config, question: Question) -> RetrievalPool:
    """Top pool_size tables by BM25, descending score, ties by ascending
    table id; zero-score tables never occupy pool slots."""
    query = tokenize(question.text)
    if not query:
        raise EmptyQueryError(f"question {question.qid!r} tokenizes to nothing")
    accum: dict[int, float] = {}
    for term in query:
        plist = index.postings.get(term)
        if not plist:
            continue
        idf = index.idf(term)
        for ordinal, tf in plist:
            contribution = idf * _tf_component(
                tf, index.doc_lengths[ordinal], cfg, index.avg_doc_length
            )
            accum[ordinal] = accum.get(ordinal, 0.0) + contribution
    scored = [
        (index.table_ids[ordinal], score)
        for ordinal, score in accum.items()
        if score > 0.0
    ]
    scored.sort(key=lambda kv: (-kv[1], kv[0]))
    return RetrievalPool(qid=question.qid, entries=scored[: cfg.pool_size])


def save_index(index: InvertedIndex, path: str | Path) -> None:
    """Persist as a line-delimited sidecar: one header line, then one
    line per term with its postings, terms sorted."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "format": INDEX_FORMAT,
            "version": INDEX_VERSION,
            "doc_count": index.doc_count,
            "avg_doc_length": index.avg_doc_length,
            "doc_lengths": index.doc_lengths,
            "table_ids": index.table_ids,
        }
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for term in sorted(index.postings):
            entry = {"t": term, "p": [[o, f] for o, f in index.postings[term]]}
            fh.write(json.dumps(entry, ensure_ascii=False) + "\n")


def load_index(path: str | Path) -> InvertedIndex:
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("format") != INDEX_FORMAT or header.get("version") != INDEX_VERSION:
            raise StoreError(f"unrecognized index file {path}")
        index = InvertedIndex(
            doc_lengths=list(header["doc_lengths"]),
            table_ids=list(header["table_ids"]),
            avg_doc_length=float(header["avg_doc_length"]),
        )
        for line in fh:
            if not line.strip():
                continue
            entry = json.loads(line)
            index.postings[entry["t"]] = [(int(o), int(f)) for o, f in entry["p"]]
    if index.doc_count != header["doc_count"]:
        raise StoreError("index header doc_count disagrees with doc_lengths")
    return index
