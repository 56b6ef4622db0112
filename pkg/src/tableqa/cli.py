"""Command-line interface.

    tableqa ingest      load a corpus file/directory into a store
    tableqa index       build and persist the BM25 index
    tableqa search      BM25 candidate pool for one question
    tableqa answer      full pipeline: tables, cells, heatmap levels
    tableqa bench       run a benchmark and write run files + report
    tableqa serve       start the HTTP service
    tableqa cache-fill  persist scorer outputs for later replay
"""

import argparse
import json
import sys
from dataclasses import replace

from .errors import TableQAError
from .evaluation import parse_qrels
from .index import build_index, retrieve_pool, save_index
from .pipeline import Pipeline, PipelineConfig, load_config
from .service import deterministic_qid, serve
from .store import Store, ingest_corpus, load_questions
from .tables import Question


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="pipeline config JSON", default=None)
    parser.add_argument("--store", help="store directory (overrides config)", default=None)
    parser.add_argument(
        "--scorer", choices=["surrogate", "remote", "replay"], default=None,
        help="scorer implementation",
    )
    parser.add_argument("--scorer-endpoint", default=None, help="remote scorer URL")
    parser.add_argument("--scorer-cache", default=None, help="replay cache path")
    parser.add_argument("--top-k", type=int, default=None, help="tables to return")
    parser.add_argument("--pool-size", type=int, default=None, help="BM25 pool size")
    parser.add_argument("--fusion", choices=["max", "mean"], default=None)


def _config_from_args(args) -> PipelineConfig:
    overrides = {}
    if args.store:
        overrides["store_path"] = args.store
    if args.top_k is not None:
        overrides["top_k"] = args.top_k
    if args.fusion:
        overrides["fusion_mode"] = args.fusion
    config = load_config(args.config, **overrides)
    if args.pool_size is not None:
        config = replace(config, bm25=replace(config.bm25, pool_size=args.pool_size))
    scorer_overrides = {}
    if args.scorer:
        scorer_overrides["kind"] = args.scorer
    if args.scorer_endpoint:
        scorer_overrides["endpoint"] = args.scorer_endpoint
    if args.scorer_cache:
        scorer_overrides["cache_path"] = args.scorer_cache
    if scorer_overrides:
        config = replace(config, scorer=replace(config.scorer, **scorer_overrides))
    if not config.store_path:
        raise SystemExit("a store path is required (--store or config file)")
    return config


def cmd_ingest(args) -> int:
    result = ingest_corpus(
        args.corpus,
        args.store,
        corpus_name=args.name,
        pad_ragged=args.pad_ragged,
        overwrite=args.overwrite,
    )
    print(f"ingested {result.manifest.table_count} tables into {args.store}")
    if result.errors:
        print(f"skipped {len(result.errors)} records:")
        for err in result.errors:
            print(f"  line {err.line_number}: {err.error_kind}: {err.detail}")
    return 0


def cmd_index(args) -> int:
    config = _config_from_args(args)
    store = Store(config.store_path)
    index = build_index(store)
    path = config.resolved_index_path()
    save_index(index, path)
    print(f"indexed {index.doc_count} tables ({len(index.postings)} terms) -> {path}")
    return 0


def cmd_search(args) -> int:
    config = _config_from_args(args)
    pipeline = Pipeline(config)
    question = Question(qid=deterministic_qid(args.question), text=args.question)
    pool = retrieve_pool(pipeline.index, config.bm25, question)
    if args.json:
        print(json.dumps({"qid": pool.qid, "entries": pool.entries}, ensure_ascii=False))
        return 0
    for rank, (table_id, score) in enumerate(pool.entries, start=1):
        print(f"{rank:>4}  {score:10.4f}  {table_id}")
    return 0


def cmd_answer(args) -> int:
    config = _config_from_args(args)
    pipeline = Pipeline(config)
    question = Question(qid=deterministic_qid(args.question), text=args.question)
    result = pipeline.answer(question)
    if args.json:
        print(json.dumps(result.to_dict(), ensure_ascii=False))
        return 0
    for table in result.tables:
        s = table.scored
        print(f"#{s.rank}  {s.table_id}  score={s.p_t:.4f}  bm25={s.bm25_score:.4f}  {table.title}")
    print("cells:")
    for cell in result.cells:
        print(
            f"  {cell.table_id}[{cell.cell.row},{cell.cell.col}] = {cell.value!r} "
            f"(score {cell.score:.4f})"
        )
    return 0


def cmd_bench(args) -> int:
    config = _config_from_args(args)
    pipeline = Pipeline(config)
    questions = load_questions(args.questions)
    qrels = parse_qrels(args.qrels)
    cell_qrels = parse_qrels(args.cell_qrels) if args.cell_qrels else None
    result = pipeline.run_benchmark(questions, qrels, args.out, cell_qrels=cell_qrels)
    print("retrieval metrics:")
    print(result.retrieval_report.format_table())
    if result.qa_report:
        print("end-to-end QA metrics:")
        print(result.qa_report.format_table())
    if result.failed:
        print(f"failed queries: {len(result.failed)}")
        for qid, reason in result.failed:
            print(f"  {qid}: {reason}")
    print(f"run files and report in {args.out}")
    return 0


def cmd_serve(args) -> int:
    config = _config_from_args(args)
    if args.host:
        config = replace(config, bind_host=args.host)
    if args.port:
        config = replace(config, bind_port=args.port)
    serve(Pipeline(config))
    return 0


def cmd_cache_fill(args) -> int:
    config = _config_from_args(args)
    pipeline = Pipeline(config)
    questions = load_questions(args.questions)
    filled = pipeline.fill_cache(questions, args.cache)
    print(f"cached scores for {filled} (question, table) pairs -> {args.cache}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tableqa", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load a corpus into a store")
    p.add_argument("--corpus", required=True, help="corpus file or directory")
    p.add_argument("--store", required=True, help="store directory to create")
    p.add_argument("--name", default=None, help="corpus name for the manifest")
    p.add_argument("--pad-ragged", action="store_true", help="pad short rows instead of rejecting")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("index", help="build the BM25 index")
    _common_flags(p)
    p.set_defaults(fn=cmd_index)

    p = sub.add_parser("search", help="BM25 pool for one question")
    _common_flags(p)
    p.add_argument("question")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("answer", help="answer one question end to end")
    _common_flags(p)
    p.add_argument("question")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_answer)

    p = sub.add_parser("bench", help="run a benchmark")
    _common_flags(p)
    p.add_argument("--questions", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--cell-qrels", default=None)
    p.add_argument("--out", required=True, help="output directory for runs and report")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("serve", help="start the HTTP service")
    _common_flags(p)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("cache-fill", help="persist scorer outputs for replay")
    _common_flags(p)
    p.add_argument("--questions", required=True)
    p.add_argument("--cache", required=True, help="cache file to fill")
    p.set_defaults(fn=cmd_cache_fill)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except TableQAError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
