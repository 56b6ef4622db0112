import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bm25_rank, bm25_score_all
from tableqa.analyzer import tokenize
from tableqa.errors import EmptyQueryError
from tableqa.index import (
    Bm25Config,
    build_index,
    bm25_score,
    load_index,
    retrieve_pool,
    save_index,
)
from tableqa.tables import Question, Table

CFG = Bm25Config()


def table_from_words(table_id, words):
    # single-cell table with an empty header name, so the document
    # tokenizes to exactly tokenize(" ".join(words))
    return Table(id=table_id, header=[""], rows=[[" ".join(words)]])


def index_of(token_docs: dict[str, list[str]]):
    return build_index(table_from_words(tid, words) for tid, words in token_docs.items())


def oracle_tokens(token_docs: dict[str, list[str]]) -> dict[str, list[str]]:
    # feed the oracle the same analyzed token streams the index sees
    return {tid: tokenize(" ".join(words)) for tid, words in token_docs.items()}


# Two-document worked fixture; expected value frozen from the
# brute-force oracle in oracles.py.
WORKED_DOCS = {"docA": ["airbus", "airbus"], "docB": ["boe"]}
WORKED_SCORE_DOC_A = 0.8763929869148733


class TestConfig:
    def test_defaults(self):
        assert CFG.k1 == 1.2 and CFG.b == 0.7 and CFG.pool_size == 300

    @pytest.mark.parametrize("kw", [dict(k1=0), dict(b=-0.1), dict(b=1.5), dict(pool_size=0)])
    def test_rejects_bad_values(self, kw):
        with pytest.raises(ValueError):
            Bm25Config(**kw)


class TestBuild:
    def test_disjoint_vocabularies(self):
        idx = index_of({"t1": ["alpha"], "t2": ["beta"]})
        assert all(len(p) == 1 for p in idx.postings.values())
        assert idx.doc_count == 2

    def test_empty_document_excluded(self):
        idx = build_index(
            [
                table_from_words("t1", ["alpha"]),
                Table(id="t2", header=[""], rows=[["the of"]]),  # stopwords only
            ]
        )
        assert idx.doc_count == 1
        assert idx.table_ids == ["t1"]
        assert idx.avg_doc_length == 1.0

    def test_rebuild_identical(self):
        docs = {"t1": ["a1", "b1", "a1"], "t2": ["b1", "c1"], "t3": ["c1"]}
        i1, i2 = index_of(docs), index_of(docs)
        assert i1.postings == i2.postings
        assert i1.doc_lengths == i2.doc_lengths
        assert i1.avg_doc_length == i2.avg_doc_length

    def test_statistics_invariants(self):
        docs = {"t1": ["x1", "y1"], "t2": ["y1", "y1", "z1"]}
        idx = index_of(docs)
        assert idx.doc_lengths == [2, 3]
        assert idx.avg_doc_length == 2.5
        assert idx.document_frequency("y1") == 2
        assert idx.document_frequency("x1") == 1


class TestScore:
    def test_worked_example(self):
        idx = index_of(WORKED_DOCS)
        score = bm25_score(idx, CFG, ["airbus"], 0)
        assert score == pytest.approx(WORKED_SCORE_DOC_A, abs=1e-12)
        assert score == pytest.approx(0.8763, abs=1e-4)

    def test_absent_term_scores_zero(self):
        idx = index_of(WORKED_DOCS)
        assert bm25_score(idx, CFG, ["airbus"], 1) == 0.0
        assert bm25_score(idx, CFG, ["zeppelin"], 0) == 0.0

    def test_duplicate_query_terms_count_twice(self):
        idx = index_of(WORKED_DOCS)
        one = bm25_score(idx, CFG, ["airbus"], 0)
        two = bm25_score(idx, CFG, ["airbus", "airbus"], 0)
        assert two == pytest.approx(2 * one)

    def test_idf_positive_for_all_df(self):
        for n in (1, 2, 10, 1000):
            for df in range(1, n + 1):
                assert math.log(1 + (n - df + 0.5) / (df + 0.5)) > 0

    @given(st.integers(1, 30), st.integers(1, 8))
    @settings(max_examples=50, deadline=None)
    def test_more_occurrences_never_score_lower(self, base_len, tf):
        # single query term; the doc with tf+1 occurrences (and one more
        # token of length) must score at least as high as with tf
        def corpus(extra):
            filler = ["pad%d" % i for i in range(base_len)]
            return {
                "target": ["hit"] * (tf + extra) + filler,
                "other": ["pad0", "other"],
            }

        lo = bm25_score_all(corpus(0), ["hit"], CFG.k1, CFG.b)["target"]
        hi = bm25_score_all(corpus(1), ["hit"], CFG.k1, CFG.b)["target"]
        idx_lo, idx_hi = index_of(corpus(0)), index_of(corpus(1))
        assert bm25_score(idx_hi, CFG, ["hit"], 0) >= bm25_score(idx_lo, CFG, ["hit"], 0)
        assert hi >= lo


class TestPool:
    def test_small_corpus_all_positive_ranked(self):
        docs = {
            "t1": ["jet", "engine"],
            "t2": ["jet"],
            "t3": ["turbine"],
            "t4": ["jet", "jet", "jet"],
            "t5": ["propeller"],
        }
        idx = index_of(docs)
        pool = retrieve_pool(idx, CFG, Question("q1", "jet engine"))
        expected = bm25_rank(
            oracle_tokens(docs), tokenize("jet engine"), CFG.k1, CFG.b, CFG.pool_size
        )
        assert [tid for tid, _ in pool.entries] == [tid for tid, _ in expected]
        for (_, a), (_, b) in zip(pool.entries, expected):
            assert a == pytest.approx(b, abs=1e-9)
        assert all(s > 0 for _, s in pool.entries)

    def test_pool_size_truncation_matches_oracle(self):
        docs = {f"t{i}": ["jet"] * (i + 1) + ["pad"] * i for i in range(5)}
        idx = index_of(docs)
        cfg = Bm25Config(pool_size=2)
        pool = retrieve_pool(idx, cfg, Question("q1", "jet"))
        expected = bm25_rank(oracle_tokens(docs), ["jet"], cfg.k1, cfg.b, 2)
        assert len(pool.entries) == 2
        assert [tid for tid, _ in pool.entries] == [tid for tid, _ in expected]

    def test_stopword_only_question(self):
        idx = index_of({"t1": ["alpha"]})
        with pytest.raises(EmptyQueryError):
            retrieve_pool(idx, CFG, Question("q1", "the of and"))

    def test_tie_broken_by_ascending_id(self):
        docs = {"tb": ["same"], "ta": ["same"], "tc": ["same"]}
        idx = index_of(docs)
        pool = retrieve_pool(idx, CFG, Question("q1", "same"))
        assert pool.table_ids() == ["ta", "tb", "tc"]

    def test_zero_score_tables_excluded(self):
        docs = {"t1": ["jet"], "t2": ["turbine"]}
        idx = index_of(docs)
        pool = retrieve_pool(idx, CFG, Question("q1", "jet"))
        assert pool.table_ids() == ["t1"]

    def test_deterministic(self):
        docs = {f"t{i}": ["jet", f"w{i % 3}"] for i in range(20)}
        idx = index_of(docs)
        q = Question("q1", "jet w1")
        assert retrieve_pool(idx, CFG, q) == retrieve_pool(idx, CFG, q)


class TestPersistence:
    def test_roundtrip_statistics(self, tmp_path):
        docs = {"t1": ["alpha", "beta", "alpha"], "t2": ["beta"], "t3": ["gamma", "beta"]}
        idx = index_of(docs)
        save_index(idx, tmp_path / "bm25.idx")
        loaded = load_index(tmp_path / "bm25.idx")
        assert loaded.postings == idx.postings
        assert loaded.doc_lengths == idx.doc_lengths
        assert loaded.table_ids == idx.table_ids
        assert loaded.avg_doc_length == idx.avg_doc_length

    def test_roundtrip_scores_identical(self, tmp_path):
        docs = {"t1": ["jet", "engine"], "t2": ["jet"]}
        idx = index_of(docs)
        save_index(idx, tmp_path / "bm25.idx")
        loaded = load_index(tmp_path / "bm25.idx")
        q = Question("q", "jet engine")
        assert retrieve_pool(loaded, CFG, q) == retrieve_pool(idx, CFG, q)


@given(
    st.dictionaries(
        st.text(alphabet="abcdefgh", min_size=1, max_size=6).map(lambda s: "t_" + s),
        st.lists(st.sampled_from(["jet", "wing", "fuel", "crew", "gate"]), max_size=12),
        max_size=12,
    ),
    st.lists(st.sampled_from(["jet", "wing", "fuel", "crew", "gate", "none"]), min_size=1, max_size=4),
)
@settings(max_examples=120, deadline=None)
def test_pool_equals_brute_force(docs, query):
    idx = index_of(docs)
    query_tokens = tokenize(" ".join(query))
    if not query_tokens:
        return
    expected = bm25_rank(oracle_tokens(docs), query_tokens, CFG.k1, CFG.b, CFG.pool_size)
    pool = retrieve_pool(idx, CFG, Question("q", " ".join(query)))
    got = pool.entries
    assert [tid for tid, _ in got] == [tid for tid, _ in expected]
    for (_, a), (_, b) in zip(got, expected):
        assert a == pytest.approx(b, abs=1e-9)
