"""Fusing row/column probabilities into table scores, re-ranking the
candidate pool, extracting answer cells, and building heatmaps.

Every function here is pure and deterministic; ties always break the
same way (higher BM25 then ascending id for tables, ascending row then
column for cells) so whole runs are replayable.
"""

from bisect import bisect_right
from dataclasses import dataclass

from .errors import EmptyScoresError, MissingScoresError, ShapeMismatchError
from .index import RetrievalPool
from .scoring import RowColumnScores
from .tables import CellRef, Table

FUSION_MAX = "max"
FUSION_MEAN = "mean"

HEATMAP_THRESHOLDS = (0.2, 0.4, 0.6, 0.8)
HEATMAP_PALETTE = ("#feedde", "#fdbe85", "#fd8d3c", "#e6550d", "#a63603")


@dataclass(frozen=True)
class ScoredTable:
    table_id: str
    p_t: float
    bm25_score: float
    rank: int


@dataclass(frozen=True)
class CellAnswer:
    table_id: str
    cell: CellRef
    value: str
    score: float


@dataclass(frozen=True)
class Heatmap:
    table_id: str
    row_levels: list[int]
    col_levels: list[int]
    cell_levels: list[list[int]]
    palette: tuple[str, ...] = HEATMAP_PALETTE

    def to_dict(self) -> dict:
        return {
            "table_id": self.table_id,
            "row_levels": self.row_levels,
            "col_levels": self.col_levels,
            "cell_levels": self.cell_levels,
            "palette": list(self.palette),
        }


def fuse(scores: RowColumnScores, mode: str = FUSION_MAX) -> float:
    """Table relevance from row/column vectors.

    "max": max(p_col) + max(p_row) - the production aggregation.
    "mean": mean(p_col) + mean(p_row) - kept as a diagnostic alternative.
    """
    if not scores.p_row or not scores.p_col:
        raise EmptyScoresError(f"table {scores.table_id!r} has empty score vectors")
    if mode == FUSION_MAX:
        return max(scores.p_col) + max(scores.p_row)
    if mode == FUSION_MEAN:
        return sum(scores.p_col) / len(scores.p_col) + sum(scores.p_row) / len(scores.p_row)
    raise ValueError(f"unknown fusion mode {mode!r}")


def rerank_pool(
    pool: RetrievalPool,
    scores: dict[str, RowColumnScores],
    k: int,
    mode: str = FUSION_MAX,
) -> list[ScoredTable]:
    """Order the pool by fused score, descending; ties prefer the higher
    BM25 score, then the lexicographically smaller table id."""
    bm25_by_id = dict(pool.entries)
    fused = []
    for table_id, bm25 in pool.entries:
        table_scores = scores.get(table_id)
        if table_scores is None:
            raise MissingScoresError(f"pool table {table_id!r} was never scored")
        fused.append((table_id, fuse(table_scores, mode), bm25))
    fused.sort(key=lambda row: (-row[1], -row[2], row[0]))
    return [
        ScoredTable(table_id=tid, p_t=p_t, bm25_score=bm25_by_id[tid], rank=i + 1)
        for i, (tid, p_t, _) in enumerate(fused[: max(k, 0)])
    ]


def _check_scores(table: Table, scores: RowColumnScores) -> None:
    if len(scores.p_row) != table.n_rows or len(scores.p_col) != table.n_cols:
        raise ShapeMismatchError(
            f"scores for table {table.id!r} are "
            f"{len(scores.p_row)}x{len(scores.p_col)}, table is "
            f"{table.n_rows}x{table.n_cols}"
        )


def extract_cells(table: Table, scores: RowColumnScores, top_c: int) -> list[CellAnswer]:
    """All cells ranked by p_row[i] + p_col[j], descending, ties by
    (row, col) ascending, truncated to top_c.

    The head of the list is always the intersection of the most probable
    row and most probable column (first-index tie rule on both argmaxes).
    """
    _check_scores(table, scores)
    ranked = sorted(
        (
            (i, j, scores.p_row[i] + scores.p_col[j])
            for i in range(table.n_rows)
            for j in range(table.n_cols)
        ),
        key=lambda c: (-c[2], c[0], c[1]),
    )
    return [
        CellAnswer(
            table_id=table.id,
            cell=CellRef(row=i, col=j),
            value=table.rows[i][j],
            score=score,
        )
        for i, j, score in ranked[: max(top_c, 0)]
    ]


def _levels(values: list[float]) -> list[int]:
    lo, hi = min(values), max(values)
    if hi == lo:
        return [0] * len(values)
    span = hi - lo
    return [bisect_right(HEATMAP_THRESHOLDS, (v - lo) / span) for v in values]


def build_heatmap(table: Table, scores: RowColumnScores) -> Heatmap:
    """Bucket min-max-normalized scores into 5 levels (0 palest .. 4 most
    saturated); an all-equal vector maps to level 0 everywhere."""
    _check_scores(table, scores)
    cell_scores = [
        (scores.p_row[i] + scores.p_col[j]) / 2.0
        for i in range(table.n_rows)
        for j in range(table.n_cols)
    ]
    flat = _levels(cell_scores)
    n = table.n_cols
    return Heatmap(
        table_id=table.id,
        row_levels=_levels(scores.p_row),
        col_levels=_levels(scores.p_col),
        cell_levels=[flat[i * n : (i + 1) * n] for i in range(table.n_rows)],
    )
