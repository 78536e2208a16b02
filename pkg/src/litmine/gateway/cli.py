"""Command-line entry points.

Every subcommand is a thin wrapper over the library: build artifacts
(ingest / index / embed), query them (search / ask / chat), evaluate
(eval / grid-search), or serve the HTTP API (serve).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..dense import HashedEmbeddingProvider
from ..errors import LitmineError
from ..treceval import GridAxis, compare_strategies, grid_search, parse_qrels, parse_topics
from .config import AppConfig
from .engine import Engine, build_embedder, run_embed, run_index, run_ingest


def _axis(text: str) -> GridAxis:
    try:
        lo, hi, step = (float(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX:STEP, got {text!r}")
    return GridAxis(lo, hi, step)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="litmine", description=__doc__)
    parser.add_argument("--config", help="YAML config file")
    parser.add_argument("--artifacts", help="artifacts directory")
    parser.add_argument("--debug", action="store_true", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse, dedup, filter, and chunk a corpus file")
    p.add_argument("corpus", help="line-delimited corpus file")
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--overlap", type=int, default=None)

    p = sub.add_parser("index", help="build and persist the inverted index")
    p.add_argument("--k1", type=float, default=None)
    p.add_argument("--b", type=float, default=None)

    p = sub.add_parser("embed", help="build and persist the vector store")
    p.add_argument("--dimension", type=int, default=None)
    p.add_argument("--embedder-endpoint", default=None)

    p = sub.add_parser("search", help="rank documents for a query")
    p.add_argument("query")
    p.add_argument("-k", "--top-k", type=int, default=None)
    p.add_argument("--bm25-threshold", type=float, default=None)
    p.add_argument("--cosine-threshold", type=float, default=None)
    p.add_argument("--strategy", choices=["sparse_only", "dense_only", "union"], default=None)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("ask", help="answer a question from the literature")
    p.add_argument("question")
    p.add_argument("--json", action="store_true")

    sub.add_parser("chat", help="interactive conversation loop")

    for name in ("eval", "grid-search"):
        p = sub.add_parser(name, help="threshold tuning against relevance judgments")
        p.add_argument("--topics", required=True)
        p.add_argument("--qrels", required=True)
        p.add_argument("--bm25-grid", type=_axis, default=None, metavar="MIN:MAX:STEP")
        p.add_argument("--cosine-grid", type=_axis, default=None, metavar="MIN:MAX:STEP")
        p.add_argument("--average", choices=["micro", "macro"], default="micro")
        p.add_argument("--json", action="store_true")
        if name == "grid-search":
            p.add_argument("--strategy", choices=["sparse_only", "dense_only", "union"], required=True)
            p.add_argument("--dump-grid", help="write every grid point to this JSONL file")

    p = sub.add_parser("serve", help="start the HTTP API")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)

    return parser


def _load_config(args: argparse.Namespace) -> AppConfig:
    overrides = {
        "artifacts_dir": args.artifacts,
        "debug": args.debug,
    }
    for name in ("window", "overlap", "k1", "b", "dimension", "embedder_endpoint",
                 "top_k", "bm25_threshold", "cosine_threshold", "strategy", "host", "port"):
        attr = getattr(args, name, None)
        if attr is not None:
            key = {
                "k1": "bm25_k1", "b": "bm25_b", "dimension": "embedding_dimension",
            }.get(name, name)
            overrides[key] = attr
    return AppConfig.load(config_file=args.config, overrides=overrides)


def _grids(args: argparse.Namespace) -> dict[str, GridAxis]:
    grids = {}
    if args.bm25_grid is not None:
        grids["bm25"] = args.bm25_grid
    if args.cosine_grid is not None:
        grids["cosine"] = args.cosine_grid
    return grids


def _print_response(response, as_json: bool, debug: bool) -> None:
    if as_json:
        print(json.dumps(response.to_dict(include_diagnostics=debug), ensure_ascii=False, indent=2))
        return
    if response.kind == "answers":
        for rank, item in enumerate(response.items, 1):
            print(f"{rank}. {item.text}    [{item.title}]")
    elif response.kind == "document_list":
        print("These papers may help:")
        for rank, item in enumerate(response.items, 1):
            print(f"{rank}. {item.title}")
    else:
        print(response.items[0].text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.debug else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        return _dispatch(args)
    except LitmineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    command = args.command

    if command == "ingest":
        _, report = run_ingest(args.corpus, cfg.artifacts_dir, cfg.window, cfg.overlap)
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
        for line_no, reason in report.skipped_lines:
            print(f"skipped line {line_no}: {reason}", file=sys.stderr)
        if report.kept == 0:
            print("warning: no documents kept", file=sys.stderr)
        return 0

    if command == "index":
        index = run_index(cfg.artifacts_dir, cfg.bm25_k1, cfg.bm25_b)
        print(f"indexed {index.doc_count} documents, {len(index.term_postings)} terms")
        return 0

    if command == "embed":
        provider = build_embedder(cfg)
        store = run_embed(cfg.artifacts_dir, provider)
        print(f"embedded {len(store)} documents at dimension {store.dimension} ({store.provider_id})")
        return 0

    if command == "search":
        engine = Engine.load(cfg)
        result = engine.search(args.query, top_k=args.top_k)
        if args.json:
            print(json.dumps(
                {"results": [c.to_dict() for c in result.candidates], "warnings": result.warnings},
                ensure_ascii=False, indent=2,
            ))
        else:
            for rank, c in enumerate(result.candidates, 1):
                print(f"{rank:2d}. {c.doc_id}  agg={c.aggregated:.4f} "
                      f"bm25={c.bm25_raw:.4f} cos={c.cosine_raw:.4f}  {engine.corpus.title_of(c.doc_id)}")
            for warning in result.warnings:
                print(f"warning: {warning}", file=sys.stderr)
        return 0

    if command == "ask":
        engine = Engine.load(cfg)
        response = engine.answer(args.question)
        _print_response(response, args.json, cfg.debug)
        return 0

    if command == "chat":
        engine = Engine.load(cfg)
        session = engine.sessions.create()
        print("litmine chat (blank line or Ctrl-D to quit)")
        while True:
            try:
                text = input("you> ").strip()
            except EOFError:
                break
            if not text or text in ("exit", "quit"):
                break
            response = engine.chat(session, text)
            _print_response(response, False, cfg.debug)
        return 0

    if command in ("eval", "grid-search"):
        engine = Engine.load(cfg)
        with open(args.topics, encoding="utf-8") as fh:
            topics, topic_rejects = parse_topics(fh)
        with open(args.qrels, encoding="utf-8") as fh:
            qrels, qrel_rejects = parse_qrels(fh)
        for line_no, reason in topic_rejects + qrel_rejects:
            print(f"rejected line {line_no}: {reason}", file=sys.stderr)

        if command == "eval":
            report = compare_strategies(
                topics, qrels, engine.index, engine.store, _grids(args),
                provider=engine.embedder, average=args.average,
            )
            print(json.dumps(report.to_dict(), indent=2) if args.json else report.format_table())
            return 0

        result = grid_search(
            args.strategy, _grids(args), topics, qrels, engine.index, engine.store,
            provider=engine.embedder, average=args.average,
        )
        summary = {"strategy": result.strategy, "best_f1": result.best_f1,
                   "best_thresholds": result.best_thresholds}
        print(json.dumps(summary, indent=2) if args.json
              else f"{result.strategy}: best F1 {result.best_f1:.4f} at {result.best_thresholds}")
        if args.dump_grid:
            with open(args.dump_grid, "w", encoding="utf-8") as fh:
                for point, f1 in result.iter_grid():
                    fh.write(json.dumps({"thresholds": point, "f1": f1}) + "\n")
        return 0

    if command == "serve":
        import uvicorn

        from .api import create_app

        engine = Engine.load(cfg)  # fail fast on bad config/artifacts
        app = create_app(engine)
        uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="info")
        return 0

    raise AssertionError(f"unhandled command {command}")


if __name__ == "__main__":
    sys.exit(main())
