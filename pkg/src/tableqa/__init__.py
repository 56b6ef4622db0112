"""End-to-end table question answering: BM25 candidate retrieval,
row/column relevance scoring, fusion re-ranking, cell answers,
heatmaps, and a TREC-style evaluation harness."""

from .analyzer import tokenize
from .errors import TableQAError
from .evaluation import Qrels, evaluate_run, parse_qrels, parse_run, write_run
from .index import Bm25Config, InvertedIndex, RetrievalPool, build_index, bm25_score, retrieve_pool
from .pipeline import Pipeline, PipelineConfig, ScorerConfig, SearchResult, load_config
from .ranking import CellAnswer, Heatmap, ScoredTable, build_heatmap, extract_cells, fuse, rerank_pool
from .scoring import (
    RemoteScorer,
    ReplayScorer,
    RowColumnScores,
    ScoreCache,
    SurrogateScorer,
    surrogate_probability,
)
from .store import Store, ingest_corpus, load_questions
from .tables import CellRef, Question, Table, serialize_column, serialize_row, serialize_table_document

__version__ = "0.1.0"
