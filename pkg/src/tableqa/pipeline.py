"""End-to-end orchestration: question in, ranked tables + answer cells
out, plus the batch benchmark runner.

The flow per question: BM25 pool over the whole corpus, row/column
scoring of every pooled table, fusion re-ranking, then cell extraction
and heatmaps for the top tables. With a deterministic scorer the whole
path is replayable byte for byte.
"""

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyQueryError, ScorerUnavailableError, TableQAError
from .evaluation import (
    MetricReport,
    Qrels,
    cell_docid,
    evaluate_run,
    parse_run,
    write_run,
)
from .index import Bm25Config, InvertedIndex, RetrievalPool, build_index, load_index, retrieve_pool, save_index
from .ranking import (
    CellAnswer,
    FUSION_MAX,
    Heatmap,
    ScoredTable,
    build_heatmap,
    extract_cells,
    rerank_pool,
)
from .scoring import (
    RecordingScorer,
    RemoteScorer,
    ReplayScorer,
    RowColumnScores,
    ScoreCache,
    SurrogateScorer,
    score_tables,
)
from .store import Store
from .tables import Question

ENV_PREFIX = "TABLEQA_"

TABLE_METRICS = ("P@5", "P@10", "NDCG@5", "NDCG@10", "NDCG@20", "MAP", "MRR", "Hit@1")
CELL_METRICS = ("MRR", "Hit@1")


class BenchmarkError(TableQAError):
    """More than half the benchmark queries failed."""


@dataclass(frozen=True)
class ScorerConfig:
    kind: str = "surrogate"  # surrogate | remote | replay
    endpoint: str = ""
    timeout: float = 10.0
    batch_size: int = 32
    retries: int = 3
    backoff_base: float = 0.2
    max_in_flight: int = 4
    cache_path: str = ""
    slope: float = 6.0
    intercept: float = -3.0


@dataclass(frozen=True)
class PipelineConfig:
    store_path: str
    index_path: str = ""  # defaults to <store_path>/bm25.idx
    bm25: Bm25Config = field(default_factory=Bm25Config)
    scorer: ScorerConfig = field(default_factory=ScorerConfig)
    fusion_mode: str = FUSION_MAX
    top_k: int = 5
    top_c: int = 10
    scorer_workers: int = 1
    bind_host: str = "127.0.0.1"
    bind_port: int = 8080
    annotation_path: str = ""  # defaults to <store_path>/annotations.jsonl

    def __post_init__(self):
        if self.top_k < 1 or self.top_c < 1:
            raise ValueError("top_k and top_c must be >= 1")

    def resolved_index_path(self) -> Path:
        return Path(self.index_path) if self.index_path else Path(self.store_path) / "bm25.idx"

    def resolved_annotation_path(self) -> Path:
        if self.annotation_path:
            return Path(self.annotation_path)
        return Path(self.store_path) / "annotations.jsonl"


def load_config(path: str | Path | None = None, env: dict | None = None,
                **overrides) -> PipelineConfig:
    """Build a PipelineConfig from a JSON file, TABLEQA_* environment
    overrides, then keyword overrides (strongest last)."""
    raw: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    env = os.environ if env is None else env
    env_map = {
        "STORE_PATH": ("store_path", str),
        "INDEX_PATH": ("index_path", str),
        "FUSION_MODE": ("fusion_mode", str),
        "TOP_K": ("top_k", int),
        "TOP_C": ("top_c", int),
        "SCORER_WORKERS": ("scorer_workers", int),
        "BIND_HOST": ("bind_host", str),
        "BIND_PORT": ("bind_port", int),
        "ANNOTATION_PATH": ("annotation_path", str),
    }
    for suffix, (key, cast) in env_map.items():
        value = env.get(ENV_PREFIX + suffix)
        if value is not None:
            raw[key] = cast(value)
    scorer_env = {
        "SCORER": ("kind", str),
        "SCORER_ENDPOINT": ("endpoint", str),
        "SCORER_CACHE": ("cache_path", str),
    }
    for suffix, (key, cast) in scorer_env.items():
        value = env.get(ENV_PREFIX + suffix)
        if value is not None:
            raw.setdefault("scorer", {})
            raw["scorer"][key] = cast(value)
    if env.get(ENV_PREFIX + "POOL_SIZE") is not None:
        raw.setdefault("bm25", {})
        raw["bm25"]["pool_size"] = int(env[ENV_PREFIX + "POOL_SIZE"])
    raw.update(overrides)
    if "bm25" in raw and isinstance(raw["bm25"], dict):
        raw["bm25"] = Bm25Config(**raw["bm25"])
    if "scorer" in raw and isinstance(raw["scorer"], dict):
        raw["scorer"] = ScorerConfig(**raw["scorer"])
    return PipelineConfig(**raw)


def make_scorer(cfg: ScorerConfig):
    if cfg.kind == "surrogate":
        return SurrogateScorer(a=cfg.slope, c=cfg.intercept)
    if cfg.kind == "remote":
        if not cfg.endpoint:
            raise ValueError("remote scorer needs an endpoint")
        return RemoteScorer(
            cfg.endpoint,
            timeout=cfg.timeout,
            batch_size=cfg.batch_size,
            retries=cfg.retries,
            backoff_base=cfg.backoff_base,
            max_in_flight=cfg.max_in_flight,
        )
    if cfg.kind == "replay":
        if not cfg.cache_path:
            raise ValueError("replay scorer needs a cache_path")
        return ReplayScorer(ScoreCache(cfg.cache_path))
    raise ValueError(f"unknown scorer kind {cfg.kind!r}")


@dataclass(frozen=True)
class RankedTable:
    scored: ScoredTable
    heatmap: Heatmap
    title: str
    surrounding_text: str
    header: list[str]
    rows: list[list[str]]

    def to_dict(self) -> dict:
        return {
            "table_id": self.scored.table_id,
            "rank": self.scored.rank,
            "score": self.scored.p_t,
            "bm25_score": self.scored.bm25_score,
            "title": self.title,
            "surrounding_text": self.surrounding_text,
            "header": self.header,
            "rows": self.rows,
            "heatmap": self.heatmap.to_dict(),
        }


@dataclass(frozen=True)
class SearchResult:
    qid: str
    tables: list[RankedTable]
    cells: list[CellAnswer]
    timings: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "qid": self.qid,
            "tables": [t.to_dict() for t in self.tables],
            "cells": [
                {
                    "table_id": c.table_id,
                    "row": c.cell.row,
                    "col": c.cell.col,
                    "value": c.value,
                    "score": c.score,
                }
                for c in self.cells
            ],
            "timings": self.timings,
        }


@dataclass(frozen=True)
class BenchmarkResult:
    retrieval_report: MetricReport
    qa_report: MetricReport | None
    table_run_path: Path
    cell_run_path: Path
    report_path: Path
    failed: list[tuple[str, str]]


class Pipeline:
    """Holds the opened store, index, and scorer for repeated queries."""

    def __init__(self, config: PipelineConfig, store: Store | None = None,
                 index: InvertedIndex | None = None, scorer=None):
        self.config = config
        self.store = store or Store(config.store_path)
        index_path = config.resolved_index_path()
        if index is not None:
            self.index = index
        elif index_path.exists():
            self.index = load_index(index_path)
        else:
            self.index = build_index(self.store)
        self.scorer = scorer if scorer is not None else make_scorer(config.scorer)

    def ensure_index_saved(self) -> Path:
        path = self.config.resolved_index_path()
        if not path.exists():
            save_index(self.index, path)
        return path

    def _retrieve_and_rank(
        self, question: Question
    ) -> tuple[RetrievalPool, dict[str, RowColumnScores], list[ScoredTable], dict[str, float]]:
        timings: dict[str, float] = {}
        t0 = time.perf_counter()
        pool = retrieve_pool(self.index, self.config.bm25, question)
        t1 = time.perf_counter()
        tables = [self.store.get_table(tid) for tid in pool.table_ids()]
        scores = score_tables(self.scorer, question, tables, workers=self.config.scorer_workers)
        t2 = time.perf_counter()
        ranking = rerank_pool(pool, scores, k=len(pool.entries), mode=self.config.fusion_mode)
        t3 = time.perf_counter()
        timings["retrieval_ms"] = (t1 - t0) * 1000.0
        timings["scoring_ms"] = (t2 - t1) * 1000.0
        timings["ranking_ms"] = (t3 - t2) * 1000.0
        return pool, scores, ranking, timings

    def _merged_cells(self, top: list[ScoredTable], scores) -> list[CellAnswer]:
        # cross-table cell ordering: score desc, then table rank, then cell
        merged: list[tuple[int, CellAnswer]] = []
        for scored in top:
            table = self.store.get_table(scored.table_id)
            for cell in extract_cells(table, scores[scored.table_id], self.config.top_c):
                merged.append((scored.rank, cell))
        merged.sort(key=lambda rc: (-rc[1].score, rc[0], rc[1].cell.row, rc[1].cell.col))
        return [cell for _, cell in merged[: self.config.top_c]]

    def answer(self, question: Question, top_k: int | None = None) -> SearchResult:
        """Full pipeline for one question; deterministic given a
        deterministic scorer."""
        pool, scores, ranking, timings = self._retrieve_and_rank(question)
        top = ranking[: top_k if top_k is not None else self.config.top_k]
        tables = []
        for scored in top:
            table = self.store.get_table(scored.table_id)
            tables.append(
                RankedTable(
                    scored=scored,
                    heatmap=build_heatmap(table, scores[scored.table_id]),
                    title=table.title,
                    surrounding_text=table.surrounding_text,
                    header=table.header,
                    rows=table.rows,
                )
            )
        cells = self._merged_cells(top, scores)
        return SearchResult(qid=question.qid, tables=tables, cells=cells, timings=timings)

    def run_benchmark(
        self,
        questions,
        qrels: Qrels,
        out_dir: str | Path,
        cell_qrels: Qrels | None = None,
    ) -> BenchmarkResult:
        """Answer every question, write table and cell run files, and
        evaluate them. Individual query failures are reported; the run
        aborts only when more than half the queries fail."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        table_run: dict[str, list[tuple[str, float]]] = {}
        cell_run: dict[str, list[tuple[str, float]]] = {}
        failed: list[tuple[str, str]] = []
        questions = list(questions)
        for question in questions:
            try:
                pool, scores, ranking, _ = self._retrieve_and_rank(question)
                cells = self._merged_cells(ranking[: self.config.top_k], scores)
            except (EmptyQueryError, ScorerUnavailableError, TableQAError) as exc:
                failed.append((question.qid, f"{type(exc).__name__}: {exc}"))
                continue
            table_run[question.qid] = [(st.table_id, st.p_t) for st in ranking]
            cell_run[question.qid] = [
                (cell_docid(c.table_id, c.cell), c.score) for c in cells
            ]
        if questions and len(failed) * 2 > len(questions):
            raise BenchmarkError(
                f"{len(failed)} of {len(questions)} queries failed: {failed[:5]}"
            )

        table_run_path = out_dir / "tables.run"
        cell_run_path = out_dir / "cells.run"
        write_run(table_run_path, {q: table_run[q] for q in sorted(table_run)})
        write_run(cell_run_path, {q: cell_run[q] for q in sorted(cell_run)})

        retrieval_report = evaluate_run(parse_run(table_run_path), qrels, metrics=TABLE_METRICS)
        qa_report = None
        if cell_qrels is not None:
            qa_report = evaluate_run(parse_run(cell_run_path), cell_qrels, metrics=CELL_METRICS)

        report_path = out_dir / "report.json"
        payload = {
            "retrieval": retrieval_report.to_dict(),
            "qa": qa_report.to_dict() if qa_report else None,
            "failed_queries": [list(f) for f in failed],
        }
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
            fh.write("\n")
        return BenchmarkResult(
            retrieval_report=retrieval_report,
            qa_report=qa_report,
            table_run_path=table_run_path,
            cell_run_path=cell_run_path,
            report_path=report_path,
            failed=failed,
        )

    def fill_cache(self, questions, cache_path: str | Path) -> int:
        """Score every pooled table for every question with the active
        scorer and persist the vectors for later replay."""
        cache = ScoreCache(cache_path)
        recorder = RecordingScorer(self.scorer, cache)
        filled = 0
        for question in questions:
            pool = retrieve_pool(self.index, self.config.bm25, question)
            tables = [self.store.get_table(tid) for tid in pool.table_ids()]
            score_tables(recorder, question, tables, workers=self.config.scorer_workers)
            filled += len(tables)
        return filled
