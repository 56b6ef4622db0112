import json

import pytest

from tableqa.errors import DuplicateIdError, ManifestExistsError, NotFoundError, StoreError
from tableqa.store import Store, ingest_corpus, load_questions
from tableqa.tables import Table


def write_corpus(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r, ensure_ascii=False) + "\n")


def rec(i, **kw):
    base = {
        "id": f"t{i}",
        "title": f"Title {i}",
        "surrounding_text": "",
        "header": ["A", "B"],
        "rows": [[f"a{i}", f"b{i}"]],
    }
    base.update(kw)
    return base


@pytest.fixture
def corpus_file(tmp_path):
    path = tmp_path / "corpus.jsonl"
    write_corpus(path, [rec(1), rec(2), rec(3)])
    return path


def test_ingest_valid_corpus(tmp_path, corpus_file):
    result = ingest_corpus(corpus_file, tmp_path / "store")
    assert result.manifest.table_count == 3
    assert result.manifest.format_version == 1
    assert result.errors == []


def test_skip_and_report_ragged(tmp_path):
    path = tmp_path / "corpus.jsonl"
    write_corpus(path, [rec(1), rec(2, rows=[["only-one-cell"]]), rec(3)])
    result = ingest_corpus(path, tmp_path / "store")
    assert result.manifest.table_count == 2
    assert len(result.errors) == 1
    assert result.errors[0].error_kind == "RaggedRows"
    assert result.errors[0].line_number == 2


def test_ragged_padding_flag(tmp_path):
    path = tmp_path / "corpus.jsonl"
    write_corpus(path, [rec(1, rows=[["x"]])])
    result = ingest_corpus(path, tmp_path / "store", pad_ragged=True)
    assert result.manifest.table_count == 1
    with Store(tmp_path / "store") as store:
        assert store.get_table("t1").rows == [["x", ""]]


def test_duplicate_id_keeps_first(tmp_path):
    path = tmp_path / "corpus.jsonl"
    write_corpus(path, [rec(1), rec(1, title="Second")])
    result = ingest_corpus(path, tmp_path / "store")
    assert result.manifest.table_count == 1
    assert result.errors[0].error_kind == "DuplicateId"
    with Store(tmp_path / "store") as store:
        assert store.get_table("t1").title == "Title 1"


def test_corrupt_json_line_reported(tmp_path):
    path = tmp_path / "corpus.jsonl"
    with open(path, "w") as fh:
        fh.write(json.dumps(rec(1)) + "\n")
        fh.write("{not json\n")
    result = ingest_corpus(path, tmp_path / "store")
    assert result.manifest.table_count == 1
    assert result.errors[0].error_kind == "CorruptRecord"


def test_manifest_exists_guard(tmp_path, corpus_file):
    ingest_corpus(corpus_file, tmp_path / "store")
    with pytest.raises(ManifestExistsError):
        ingest_corpus(corpus_file, tmp_path / "store")
    # explicit overwrite is allowed
    result = ingest_corpus(corpus_file, tmp_path / "store", overwrite=True)
    assert result.manifest.table_count == 3


def test_get_table_roundtrip(tmp_path, corpus_file):
    ingest_corpus(corpus_file, tmp_path / "store")
    with Store(tmp_path / "store") as store:
        t = store.get_table("t2")
        assert t == Table(
            id="t2", header=["A", "B"], rows=[["a2", "b2"]], title="Title 2"
        )
        with pytest.raises(NotFoundError):
            store.get_table("missing")


def test_unicode_roundtrip(tmp_path):
    path = tmp_path / "corpus.jsonl"
    write_corpus(path, [rec(1, rows=[["München", "中文"]])])
    ingest_corpus(path, tmp_path / "store")
    with Store(tmp_path / "store") as store:
        assert store.get_table("t1").rows == [["München", "中文"]]


def test_every_manifest_id_resolves(tmp_path, corpus_file):
    ingest_corpus(corpus_file, tmp_path / "store")
    with Store(tmp_path / "store") as store:
        assert len(store) == 3
        assert store.ids() == ["t1", "t2", "t3"]
        for tid in store.ids():
            assert store.get_table(tid).id == tid


def test_iteration_in_ingest_order(tmp_path, corpus_file):
    ingest_corpus(corpus_file, tmp_path / "store")
    with Store(tmp_path / "store") as store:
        assert [t.id for t in store] == ["t1", "t2", "t3"]


def test_ingest_deterministic_modulo_timestamp(tmp_path, corpus_file):
    r1 = ingest_corpus(corpus_file, tmp_path / "s1")
    r2 = ingest_corpus(corpus_file, tmp_path / "s2")
    assert r1.manifest.table_count == r2.manifest.table_count
    assert (tmp_path / "s1" / "tables.jsonl").read_bytes() == (
        tmp_path / "s2" / "tables.jsonl"
    ).read_bytes()


def test_directory_source(tmp_path):
    src = tmp_path / "src"
    src.mkdir()
    write_corpus(src / "a.jsonl", [rec(1)])
    write_corpus(src / "b.jsonl", [rec(2)])
    result = ingest_corpus(src, tmp_path / "store")
    assert result.manifest.table_count == 2


def test_open_missing_store(tmp_path):
    with pytest.raises(StoreError):
        Store(tmp_path / "nowhere")


def test_ingest_report_persisted(tmp_path):
    path = tmp_path / "corpus.jsonl"
    write_corpus(path, [rec(1), rec(1)])
    ingest_corpus(path, tmp_path / "store")
    with Store(tmp_path / "store") as store:
        report = store.ingest_report()
        assert len(report) == 1 and report[0].error_kind == "DuplicateId"


class TestQuestions:
    def test_load(self, tmp_path):
        path = tmp_path / "q.jsonl"
        path.write_text('{"qid": "q1", "text": "one"}\n{"qid": "q2", "text": "two"}\n')
        qs = load_questions(path)
        assert len(qs) == 2
        assert qs.questions[0].qid == "q1"

    def test_duplicate_qid(self, tmp_path):
        path = tmp_path / "q.jsonl"
        path.write_text('{"qid": "q1", "text": "one"}\n{"qid": "q1", "text": "two"}\n')
        with pytest.raises(DuplicateIdError):
            load_questions(path)

    def test_empty_file_is_valid(self, tmp_path):
        path = tmp_path / "q.jsonl"
        path.write_text("")
        assert len(load_questions(path)) == 0
