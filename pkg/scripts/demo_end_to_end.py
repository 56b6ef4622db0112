#!/usr/bin/env python3
"""End-to-end walkthrough on a tiny in-script corpus: ingest, index,
answer one question with the surrogate scorer, and print the ranked
tables, answer cells, and heatmap levels.

    python3 scripts/demo_end_to_end.py
"""

import json
import tempfile
from pathlib import Path

from tableqa.pipeline import Pipeline, PipelineConfig
from tableqa.store import ingest_corpus
from tableqa.tables import Question

CORPUS = [
    {
        "id": "fleet",
        "title": "Airbus fleet",
        "surrounding_text": "Aircraft owned as of the last annual report.",
        "header": ["Model", "Count", "Delivered"],
        "rows": [
            ["A320", "10", "2016"],
            ["A330", "4", "2018"],
            ["A350", "2", "2021"],
        ],
    },
    {
        "id": "orders",
        "title": "Open orders",
        "surrounding_text": "Purchase agreements pending delivery.",
        "header": ["Model", "Quantity", "Signed"],
        "rows": [
            ["A320neo", "12", "2022"],
            ["B787", "3", "2020"],
        ],
    },
    {
        "id": "crew",
        "title": "Crew headcount",
        "surrounding_text": "",
        "header": ["Role", "Count"],
        "rows": [["pilots", "48"], ["cabin crew", "210"]],
    },
]

QUESTION = "how many A320 in the airbus fleet"


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        corpus_path = Path(tmp) / "corpus.jsonl"
        with open(corpus_path, "w", encoding="utf-8") as fh:
            for record in CORPUS:
                fh.write(json.dumps(record) + "\n")
        store_path = Path(tmp) / "store"
        ingest_corpus(corpus_path, store_path)

        pipeline = Pipeline(PipelineConfig(store_path=str(store_path), top_k=3))
        result = pipeline.answer(Question("demo", QUESTION))

        print(f"question: {QUESTION}\n")
        for table in result.tables:
            s = table.scored
            print(f"#{s.rank} {s.table_id:8s} fused={s.p_t:.4f} bm25={s.bm25_score:.4f} {table.title}")
            print(f"   row levels: {table.heatmap.row_levels}  col levels: {table.heatmap.col_levels}")
        print("\ntop cells:")
        for cell in result.cells[:5]:
            print(
                f"   {cell.table_id}[{cell.cell.row},{cell.cell.col}] = {cell.value!r}"
                f"  score={cell.score:.4f}"
            )
        print(f"\ntimings (ms): { {k: round(v, 2) for k, v in result.timings.items()} }")


if __name__ == "__main__":
    main()
