"""TREC-style evaluation: qrels and run file I/O plus the ranked
retrieval metrics P@k, NDCG@k, MAP, MRR, and Hit@1.

File formats (whitespace-separated, UTF-8):
    qrels line:  qid 0 docid grade
    run line:    qid Q0 docid rank score tag

Cell-level ground truth and runs reuse the same formats through
composite doc ids of the form "<table_id>#r<row>c<col>", so both layers
stay compatible with standard tooling.

Metrics depend only on rank order: queries are evaluated in the run
file's rank order (ranks are validated contiguous with non-increasing
scores at parse time). Queries with no positive qrels grade, or missing
from run or qrels, are skipped and reported, never averaged.
"""

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import NoRelevantError, ParseError
from .tables import CellRef

METRICS = ("P@5", "P@10", "NDCG@5", "NDCG@10", "NDCG@20", "MAP", "MRR", "Hit@1")
DEFAULT_RUN_TAG = "tableqa"

_CELL_DOCID_RE = re.compile(r"^(?P<table>.+)#r(?P<row>\d+)c(?P<col>\d+)$")


def cell_docid(table_id: str, cell: CellRef) -> str:
    return f"{table_id}#r{cell.row}c{cell.col}"


def parse_cell_docid(docid: str) -> tuple[str, CellRef]:
    match = _CELL_DOCID_RE.match(docid)
    if match is None:
        raise ValueError(f"{docid!r} is not a cell doc id")
    return match.group("table"), CellRef(int(match.group("row")), int(match.group("col")))


# ---------------------------------------------------------------------------
# qrels / run files


@dataclass(frozen=True)
class Qrels:
    """Relevance grades per query: qid -> docid -> int grade >= 0."""

    grades: dict[str, dict[str, int]] = field(default_factory=dict)

    def positives(self, qid: str) -> set[str]:
        return {d for d, g in self.grades.get(qid, {}).items() if g > 0}

    def num_relevant(self, qid: str) -> int:
        return len(self.positives(qid))

    def __contains__(self, qid: str) -> bool:
        return qid in self.grades


@dataclass(frozen=True)
class RunEntry:
    docid: str
    rank: int
    score: float
    tag: str = DEFAULT_RUN_TAG


def parse_qrels(path: str | Path) -> Qrels:
    grades: dict[str, dict[str, int]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ParseError(f"expected 4 fields, got {len(parts)}", line_number)
            qid, _, docid, grade_text = parts
            try:
                grade = int(grade_text)
            except ValueError:
                raise ParseError(f"grade {grade_text!r} is not an integer", line_number) from None
            if grade < 0:
                raise ParseError(f"negative grade {grade}", line_number)
            grades.setdefault(qid, {})[docid] = grade
    return Qrels(grades=grades)


def write_qrels(path: str | Path, qrels: Qrels) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for qid in qrels.grades:
            for docid, grade in qrels.grades[qid].items():
                fh.write(f"{qid} 0 {docid} {grade}\n")


def parse_run(path: str | Path) -> dict[str, list[RunEntry]]:
    run: dict[str, list[RunEntry]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 6:
                raise ParseError(f"expected 6 fields, got {len(parts)}", line_number)
            qid, _, docid, rank_text, score_text, tag = parts
            try:
                entry = RunEntry(docid=docid, rank=int(rank_text), score=float(score_text), tag=tag)
            except ValueError:
                raise ParseError("rank or score not numeric", line_number) from None
            run.setdefault(qid, []).append(entry)
    for qid, entries in run.items():
        entries.sort(key=lambda e: e.rank)
        if [e.rank for e in entries] != list(range(1, len(entries) + 1)):
            raise ParseError(f"query {qid!r}: ranks not contiguous from 1", 0)
        if any(a.score < b.score for a, b in zip(entries, entries[1:])):
            raise ParseError(f"query {qid!r}: scores increase with rank", 0)
    return run


def write_run(
    path: str | Path,
    run: dict[str, list[tuple[str, float]]],
    tag: str = DEFAULT_RUN_TAG,
) -> None:
    """Write ranked (docid, score) lists; ranks are assigned contiguously
    from 1 in list order and scores rendered with 6 decimal places."""
    with open(path, "w", encoding="utf-8") as fh:
        for qid in run:
            for rank, (docid, score) in enumerate(run[qid], start=1):
                fh.write(f"{qid} Q0 {docid} {rank} {score:.6f} {tag}\n")


def run_docids(entries: list[RunEntry]) -> list[str]:
    return [e.docid for e in entries]


# ---------------------------------------------------------------------------
# per-query metrics


def precision_at_k(ranking: list[str], grades: dict[str, int], k: int) -> float:
    """Fraction of the top k that is relevant; short rankings count the
    missing tail as non-relevant."""
    if k < 1:
        raise ValueError("k must be >= 1")
    hits = sum(1 for docid in ranking[:k] if grades.get(docid, 0) > 0)
    return hits / k


def ndcg_at_k(ranking: list[str], grades: dict[str, int], k: int) -> float:
    """Normalized DCG with linear gain and log2(rank+1) discount; the
    ideal ranking is the qrels grades sorted descending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    positive = sorted((g for g in grades.values() if g > 0), reverse=True)
    if not positive:
        raise NoRelevantError("query has no relevant documents")
    dcg = sum(
        grades.get(docid, 0) / math.log2(i + 1)
        for i, docid in enumerate(ranking[:k], start=1)
    )
    idcg = sum(g / math.log2(i + 1) for i, g in enumerate(positive[:k], start=1))
    return dcg / idcg


def average_precision(ranking: list[str], grades: dict[str, int]) -> float:
    """Mean of precision at each relevant retrieved rank, over the total
    number of relevant documents (retrieved or not)."""
    total_relevant = sum(1 for g in grades.values() if g > 0)
    if total_relevant == 0:
        raise NoRelevantError("query has no relevant documents")
    hits = 0
    cum = 0.0
    for i, docid in enumerate(ranking, start=1):
        if grades.get(docid, 0) > 0:
            hits += 1
            cum += hits / i
    return cum / total_relevant


def reciprocal_rank(ranking: list[str], relevant: set[str]) -> float:
    """1/rank of the first relevant entry, 0 when never retrieved."""
    for i, docid in enumerate(ranking, start=1):
        if docid in relevant:
            return 1.0 / i
    return 0.0


def hit_at_1(ranking: list[str], relevant: set[str]) -> float:
    return 1.0 if ranking and ranking[0] in relevant else 0.0


_METRIC_FNS = {
    "P@5": lambda r, g, rel: precision_at_k(r, g, 5),
    "P@10": lambda r, g, rel: precision_at_k(r, g, 10),
    "NDCG@5": lambda r, g, rel: ndcg_at_k(r, g, 5),
    "NDCG@10": lambda r, g, rel: ndcg_at_k(r, g, 10),
    "NDCG@20": lambda r, g, rel: ndcg_at_k(r, g, 20),
    "MAP": lambda r, g, rel: average_precision(r, g),
    "MRR": lambda r, g, rel: reciprocal_rank(r, rel),
    "Hit@1": lambda r, g, rel: hit_at_1(r, rel),
}


# ---------------------------------------------------------------------------
# report assembly


@dataclass(frozen=True)
class MetricReport:
    metrics: tuple[str, ...]
    per_query: dict[str, dict[str, float]]  # metric -> qid -> value
    averages: dict[str, float]
    evaluated: list[str]
    skipped: list[tuple[str, str]]  # (qid, reason)

    def to_dict(self) -> dict:
        return {
            "metrics": list(self.metrics),
            "averages": self.averages,
            "per_query": self.per_query,
            "evaluated_queries": self.evaluated,
            "skipped_queries": [list(s) for s in self.skipped],
        }

    def format_table(self) -> str:
        """Aligned plain-text summary, one metric per line."""
        width = max(len(m) for m in self.metrics)
        lines = [f"{m:<{width}}  {self.averages[m]:.4f}" for m in self.metrics]
        lines.append(f"queries evaluated: {len(self.evaluated)}, skipped: {len(self.skipped)}")
        return "\n".join(lines)


def evaluate_run(
    run: dict[str, list[RunEntry]],
    qrels: Qrels,
    metrics: tuple[str, ...] = METRICS,
) -> MetricReport:
    """Per-query metrics in rank order plus arithmetic macro averages.

    Skips (with a reason) queries that are missing from qrels, have no
    positive grade, or appear in qrels but not in the run.
    """
    unknown = [m for m in metrics if m not in _METRIC_FNS]
    if unknown:
        raise ValueError(f"unknown metrics: {unknown}")
    per_query: dict[str, dict[str, float]] = {m: {} for m in metrics}
    evaluated: list[str] = []
    skipped: list[tuple[str, str]] = []
    for qid in sorted(run):
        grades = qrels.grades.get(qid)
        if grades is None:
            skipped.append((qid, "no qrels entry"))
            continue
        relevant = qrels.positives(qid)
        if not relevant:
            skipped.append((qid, "no relevant documents"))
            continue
        ranking = run_docids(run[qid])
        for metric in metrics:
            per_query[metric][qid] = _METRIC_FNS[metric](ranking, grades, relevant)
        evaluated.append(qid)
    for qid in sorted(qrels.grades):
        if qid not in run:
            skipped.append((qid, "not in run"))
    averages = {
        m: (sum(per_query[m].values()) / len(evaluated) if evaluated else 0.0)
        for m in metrics
    }
    return MetricReport(
        metrics=tuple(metrics),
        per_query=per_query,
        averages=averages,
        evaluated=evaluated,
        skipped=skipped,
    )
