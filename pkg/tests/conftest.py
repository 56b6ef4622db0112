import json

import pytest

from tableqa.pipeline import Pipeline, PipelineConfig, ScorerConfig
from tableqa.store import ingest_corpus

# Small aviation-flavored corpus. "t_unique" is the only table containing
# both rare tokens of the planted question, concentrated in row 0 and
# column 0, so the surrogate provably ranks it and its (0,0) cell first.
TOY_TABLES = [
    {
        "id": "t_unique",
        "title": "Zephyr turbine inventory",
        "surrounding_text": "Inventory snapshot for the zephyr program.",
        "header": ["Part", "Stock"],
        "rows": [["zephyr turbine", "12"], ["spare blade", "3"]],
    },
    {
        "id": "t_partial",
        "title": "Turbine maintenance",
        "surrounding_text": "",
        "header": ["Task", "Hours"],
        "rows": [["turbine check", "5"], ["oil change", "1"]],
    },
    {
        "id": "t_other",
        "title": "Crew roster",
        "surrounding_text": "Cabin crew assignments.",
        "header": ["Name", "Role"],
        "rows": [["Dana", "pilot"], ["Alex", "engineer"]],
    },
    {
        "id": "t_fleet",
        "title": "Airbus fleet",
        "surrounding_text": "Current fleet composition.",
        "header": ["Model", "Count"],
        "rows": [["A320", "10"], ["A330", "4"]],
    },
]

UNIQUE_QUESTION = "zephyr turbine"


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


@pytest.fixture
def toy_store_path(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    write_jsonl(corpus, TOY_TABLES)
    store_path = tmp_path / "store"
    ingest_corpus(corpus, store_path)
    return store_path


@pytest.fixture
def toy_pipeline(toy_store_path):
    config = PipelineConfig(store_path=str(toy_store_path))
    return Pipeline(config)


@pytest.fixture
def replay_config(toy_store_path, tmp_path):
    def make(cache_path):
        return PipelineConfig(
            store_path=str(toy_store_path),
            scorer=ScorerConfig(kind="replay", cache_path=str(cache_path)),
        )

    return make
