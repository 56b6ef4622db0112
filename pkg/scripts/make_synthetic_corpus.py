#!/usr/bin/env python3
"""Generate a synthetic benchmark: corpus, questions, and qrels.

Each question targets one table through a unique theme token, so the
gold table is recoverable and the files are ready for `tableqa bench`.

    python3 scripts/make_synthetic_corpus.py --out data/ --tables 1000 --questions 100
"""

import argparse
import json
import random
from pathlib import Path


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--tables", type=int, default=1000)
    parser.add_argument("--questions", type=int, default=100)
    parser.add_argument("--seed", type=int, default=13)
    args = parser.parse_args()

    if args.questions > args.tables:
        parser.error("--questions cannot exceed --tables (one gold table per question)")

    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    filler = [f"term{i:03d}" for i in range(200)]
    with open(out / "corpus.jsonl", "w", encoding="utf-8") as fh:
        for i in range(args.tables):
            theme = f"theme{i:04d}"
            rows = [
                [f"{theme} {rng.choice(filler)}", str(rng.randint(1, 99))]
                for _ in range(rng.randint(2, 6))
            ]
            record = {
                "id": f"t{i:04d}",
                "title": f"Catalog {theme}",
                "surrounding_text": " ".join(rng.choices(filler, k=rng.randint(0, 12))),
                "header": ["item", "qty"],
                "rows": rows,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    with open(out / "questions.jsonl", "w", encoding="utf-8") as fh, open(
        out / "gold.qrels", "w", encoding="utf-8"
    ) as qf:
        for q in range(args.questions):
            table = rng.randrange(args.tables)
            theme = f"theme{table:04d}"
            fh.write(
                json.dumps({"qid": f"q{q:04d}", "text": f"how many {theme} items"}) + "\n"
            )
            qf.write(f"q{q:04d} 0 t{table:04d} 1\n")

    print(f"wrote corpus.jsonl, questions.jsonl, gold.qrels to {out}")
    print("next:")
    print(f"  tableqa ingest --corpus {out}/corpus.jsonl --store {out}/store")
    print(f"  tableqa bench --store {out}/store --questions {out}/questions.jsonl "
          f"--qrels {out}/gold.qrels --out {out}/bench")


if __name__ == "__main__":
    main()
