"""Command routing for the ThoughtRank command line."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

from .common import ConfigurationError, ThoughtRankError
from .core.explain import Explanation, explain_included
from .core.hierarchy import Hierarchy, OptionThought, ScoreMatrix
from .core.ranking import FilterMode, RankedOutput, hard_filter, progressive_top_k, top_k
from .corpus import Document, load_corpus
from .evaluation import evaluate_files
from .perf import configure_logging, get_logger
from .pipeline.config import PipelineConfig, load_config
from .pipeline.initiation import ChatInitiator
from .pipeline.metrics import dense_tiers
from .pipeline.refinement import bind_refinements
from .pipeline.runner import LayerError, run_pipeline
from .pipeline.trace import PipelineTrace, explain_document, explain_trace, verify_trace
from .preflight import ensure_ready_or_raise
from .providers import ChatClient, ScoreFixture, TranscriptStore, bm25_rank, build_registry
from .providers.chat import MODES
from .ui.report import render_report
from .ui.results import dumps_records, result_records, write_results, write_text

EXIT_CODES = {
    "usage": 2,
    "config": 3,
    "ingestion": 4,
    "provider": 5,
    "evaluation": 6,
    "contract": 7,
    "internal": 1,
}


def _log(level: int, message: str) -> None:
    get_logger().log(level, f"[ThoughtRank-Router] {message}")


@dataclass
class CommandContext:
    args: argparse.Namespace
    stdout: TextIO = field(default_factory=lambda: sys.stdout)
    stderr: TextIO = field(default_factory=lambda: sys.stderr)

    def emit(self, text: str, path: Optional[str] = None) -> None:
        if path:
            write_text(path, text)
        else:
            self.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thoughtrank", description="Layered constraint-hierarchy document ranking.")
    parser.add_argument("--log-level", help="logging level (default: THOUGHTRANK_LOG_LEVEL or WARNING)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a pipeline configuration over a corpus")
    _add_run_arguments(run)

    rank = sub.add_parser("rank", help="one-shot hierarchical top-k from a score fixture")
    rank.add_argument("--config", required=True)
    rank.add_argument("--scores", help="score fixture (default: the config's scores file)")
    rank.add_argument("--corpus", help="corpus fixing the document order (default: fixture order)")
    rank.add_argument("--top-k", type=int, default=1, dest="top_k")
    rank.add_argument("--progressive", action="store_true")
    rank.add_argument("--explain", action="store_true")
    rank.add_argument("--out", required=True)

    evaluate = sub.add_parser("eval", help="precision, recall and F2 against gold relevance")
    evaluate.add_argument("--predictions", required=True)
    evaluate.add_argument("--gold", required=True)
    evaluate.add_argument("--query-id", dest="query_id")
    evaluate.add_argument("--baseline", action="append", default=[], metavar="NAME=PATH")
    evaluate.add_argument("--format", choices=("text", "csv"), default="text")
    evaluate.add_argument("--out")

    baseline = sub.add_parser("baseline", help="BM25 ranking or a pipeline restricted to some layers")
    baseline.add_argument("--kind", choices=("bm25", "layers"), required=True)
    baseline.add_argument("--keep", action="append", default=[], metavar="LAYER")
    baseline.add_argument("--queries", help="JSONL {\"query\": id, \"text\": ...} for multi-query BM25 runs")
    _add_run_arguments(baseline, config_required=False, top_k_default=10)

    explain = sub.add_parser("explain", help="re-derive explanations from a stored trace")
    explain.add_argument("--trace", required=True)
    explain.add_argument("--doc", action="append", default=[])
    explain.add_argument("--out")
    return parser


def _add_run_arguments(parser: argparse.ArgumentParser, config_required: bool = True,
                       top_k_default: Optional[int] = None) -> None:
    parser.add_argument("--config", required=config_required)
    parser.add_argument("--corpus")
    parser.add_argument("--query")
    parser.add_argument("--top-k", type=int, default=top_k_default, dest="top_k")
    parser.add_argument("--out", required=True)
    parser.add_argument("--trace")
    parser.add_argument("--explain", action="store_true")
    parser.add_argument("--mode", choices=MODES)


def _positive(value: Optional[int], flag: str) -> None:
    if value is not None and value < 1:
        raise ConfigurationError(f"{flag} must be a positive integer")


def _chat_client(config: PipelineConfig, mode: str) -> Optional[ChatClient]:
    if not config.uses_chat:
        return None
    store = None
    if mode == "replay":
        store = TranscriptStore.load(config.transcripts)
    elif mode == "record":
        store = TranscriptStore.load(config.transcripts, missing_ok=True)
    return ChatClient(config.chat, mode, store)


def execute_config(ctx: CommandContext, config: PipelineConfig) -> Tuple[RankedOutput, PipelineTrace]:
    args = ctx.args
    mode = args.mode or config.mode
    corpus_path = args.corpus or config.corpus
    query = args.query if args.query is not None else config.query
    _positive(args.top_k, "--top-k")
    ensure_ready_or_raise(config, corpus_path, mode)
    corpus = load_corpus(corpus_path)
    fixture = ScoreFixture.load(config.scores) if config.uses_table else None
    client = _chat_client(config, mode)
    registry = build_registry(corpus, fixture, client)
    layers = bind_refinements(config.layers, client) if client is not None else config.layers
    initiator = ChatInitiator(client) if client is not None else None
    try:
        output, trace = run_pipeline(layers, corpus, query, registry, initiator=initiator,
                                     parallelism=config.parallelism)
    except LayerError as exc:
        if args.trace and exc.trace is not None:
            write_text(args.trace, exc.trace.dumps())
        raise
    finally:
        if client is not None:
            client.finish()
    verify_trace(trace)
    explanations = explain_trace(trace) if args.explain else None
    depth_bound = args.top_k if args.top_k is not None else config.top_k
    count = write_results(args.out, output, trace.matrix, explanations, depth_bound)
    if args.trace:
        write_text(args.trace, trace.dumps())
    _log(logging.INFO, f"Wrote {count} results to {args.out}")
    return output, trace


def cmd_run(ctx: CommandContext) -> int:
    execute_config(ctx, load_config(ctx.args.config))
    return 0


def rank_fixture(
    docs: Sequence[str],
    matrix: ScoreMatrix,
    config: PipelineConfig,
    k: int,
    progressive: bool = False,
) -> Tuple[RankedOutput, Optional[Hierarchy], List[str]]:
    """Filter layers form the hard slot; the other layers' slots are ranked."""

    candidates = list(docs)
    for layer in config.layers:
        if layer.metric.is_filter:
            mode = FilterMode.all() if layer.metric.kind == "all" else FilterMode.at_least(layer.metric.k)
            candidates = hard_filter(candidates, matrix, layer.thoughts, mode)
    slots = [slot for layer in config.layers if not layer.metric.is_filter for slot in layer.hierarchy.slots]
    if not slots:
        return RankedOutput(tuple(candidates), {d: 0 for d in candidates}, k, tuple(candidates)), None, candidates
    hierarchy = Hierarchy(tuple(slots))
    ranker = progressive_top_k if progressive else top_k
    return ranker(candidates, matrix, hierarchy, k), hierarchy, candidates


def _config_thoughts(config: PipelineConfig) -> Tuple[OptionThought, ...]:
    return tuple(t for layer in config.layers for t in layer.thoughts)


def cmd_rank(ctx: CommandContext) -> int:
    args = ctx.args
    _positive(args.top_k, "--top-k")
    config = load_config(args.config)
    scores = args.scores or config.scores
    if not scores:
        raise ConfigurationError("rank needs --scores or the config's scores file")
    fixture = ScoreFixture.load(scores)
    matrix = fixture.to_matrix()
    docs = [d.id for d in load_corpus(args.corpus)] if args.corpus else fixture.documents
    output, hierarchy, candidates = rank_fixture(docs, matrix, config, args.top_k, args.progressive)
    explanations: Optional[Dict[str, Explanation]] = None
    if args.explain:
        hard = tuple(t for layer in config.layers if layer.metric.is_filter for t in layer.thoughts)
        explanations = {}
        if hierarchy is not None:
            full = top_k(candidates, matrix, hierarchy, args.top_k)
            for doc in output.survivors:
                explanations[doc] = explain_included(matrix, doc, args.top_k, full, hierarchy, hard)
        else:
            for doc in output.survivors:
                hard_ids = tuple(t.id for t in hard if matrix.get(doc, t.id) > 0)
                explanations[doc] = Explanation(doc, "included", (), k=args.top_k, fallback=True, hard=hard_ids)
    count = write_results(args.out, output, matrix.restricted(output.survivors, _config_thoughts(config)),
                          explanations)
    _log(logging.INFO, f"Ranked {len(docs)} documents, {count} within depth {args.top_k}")
    return 0


def _read_queries(path: str) -> List[Tuple[str, str]]:
    queries = []
    try:
        with open(path, "r", encoding="utf-8") as stream:
            for number, raw in enumerate(stream, start=1):
                if not raw.strip():
                    continue
                try:
                    record = json.loads(raw)
                    queries.append((str(record["query"]), str(record["text"])))
                except (ValueError, KeyError, TypeError):
                    raise ConfigurationError("query records need 'query' and 'text'", path=f"{path}:{number}") from None
    except OSError as exc:
        raise ConfigurationError(f"cannot read queries: {exc.strerror or exc}", path=path) from None
    return queries


def _bm25_output(ranked: Sequence[Tuple[Document, float]]) -> Tuple[RankedOutput, ScoreMatrix]:
    pairs = [(doc.id, (score,)) for doc, score in ranked]
    depths = dense_tiers(pairs)
    ids = tuple(doc.id for doc, _ in ranked)
    k = depths[ids[-1]] + 1 if ids else 1
    matrix = ScoreMatrix({(doc.id, "bm25"): score for doc, score in ranked})
    return RankedOutput(ids, depths, k, ids), matrix


def cmd_baseline(ctx: CommandContext) -> int:
    args = ctx.args
    if args.kind == "layers":
        if not args.config:
            raise ConfigurationError("layer baselines need --config")
        if not args.keep:
            raise ConfigurationError("layer baselines need at least one --keep LAYER")
        config = load_config(args.config).restricted(args.keep)
        execute_config(ctx, config)
        return 0

    _positive(args.top_k, "--top-k")
    config = load_config(args.config) if args.config else None
    corpus_path = args.corpus or (config.corpus if config else None)
    if not corpus_path:
        raise ConfigurationError("bm25 baseline needs --corpus")
    corpus = load_corpus(corpus_path)
    if args.queries:
        lines = []
        for query_id, text in _read_queries(args.queries):
            ranked = bm25_rank(corpus, text, args.top_k)
            lines.append({"query": query_id, "retrieved": [doc.id for doc, _ in ranked]})
        write_text(args.out, dumps_records(lines))
        return 0
    query = args.query if args.query is not None else (config.query if config else "")
    if not query:
        raise ConfigurationError("bm25 baseline needs --query, --queries or a config query")
    output, matrix = _bm25_output(bm25_rank(corpus, query, args.top_k))
    write_text(args.out, dumps_records(result_records(output, matrix)))
    return 0


def cmd_eval(ctx: CommandContext) -> int:
    args = ctx.args
    baselines = []
    for item in args.baseline:
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            raise ConfigurationError(f"--baseline expects NAME=PATH, got {item!r}")
        baselines.append((name, path))
    report = evaluate_files(args.predictions, args.gold, args.query_id, baselines)
    ctx.emit(render_report(report, args.format), args.out)
    return 0


def cmd_explain(ctx: CommandContext) -> int:
    args = ctx.args
    trace = PipelineTrace.load(args.trace)
    verify_trace(trace)
    if args.doc:
        explanations = {doc: explain_document(trace, doc) for doc in args.doc}
    else:
        explanations = explain_trace(trace)
    records = [explanations[doc].to_dict() for doc in explanations]
    ctx.emit(dumps_records(records), args.out)
    return 0


COMMANDS = {
    "run": cmd_run,
    "rank": cmd_rank,
    "eval": cmd_eval,
    "baseline": cmd_baseline,
    "explain": cmd_explain,
}


def dispatch(argv: Sequence[str], stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    """Parse ``argv``, run the command and map errors to exit statuses."""

    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    configure_logging(args.log_level)
    context = CommandContext(args, stdout, stderr)
    try:
        return COMMANDS[args.command](context)
    except ThoughtRankError as exc:
        category = getattr(exc, "category", "internal")
        _log(logging.DEBUG, f"{args.command} failed: {exc!r}")
        stderr.write(f"error[{category}]: {exc}\n")
        return EXIT_CODES.get(category, 1)
