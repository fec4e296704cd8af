"""Layer-by-layer execution with backtracking and a full trace.

Layers run strictly in order; inside a layer the (document, thought) scores
are computed by a thread pool bounded by the ``parallelism`` setting, and the
metric is applied only once every score of the layer is present.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING, Callable, Dict, List, Optional, Sequence, Tuple, Union

from ..cache import ScoreCache
from ..common import ConfigurationError, Settings, ThoughtRankError
from ..core.hierarchy import ScoreMatrix
from ..core.ranking import RankedOutput
from ..corpus import Document
from ..perf import get_logger, log_duration, timed
from ..providers.base import ProviderRegistry
from .layers import LayerSpec
from .metrics import apply_metric, dense_tiers
from .trace import BacktrackEvent, LayerRecord, PipelineTrace

if TYPE_CHECKING:
    from .config import PipelineConfig

LAYER_WARN_MS = 30000

ExpandHook = Callable[[LayerRecord, Sequence[Document]], Sequence[LayerSpec]]
Initiator = Callable[[LayerSpec, str], LayerSpec]


def _log(level: int, message: str) -> None:
    get_logger().log(level, f"[ThoughtRank-Pipeline] {message}")


class LayerError(ThoughtRankError):
    """A layer could not be scored; carries the provider's diagnostic."""

    def __init__(self, layer: str, cause: ThoughtRankError, trace: Optional[PipelineTrace] = None) -> None:
        self.layer = layer
        self.cause = cause
        self.trace = trace
        self.category = cause.category
        super().__init__(f"layer {layer}: {cause}")


def _parallelism(value: Optional[int]) -> int:
    if value is None:
        value = Settings().get_int("parallelism")
    return max(1, value)


def score_layer(
    docs: Sequence[Document],
    layer: LayerSpec,
    providers: ProviderRegistry,
    query: str,
    cache: ScoreCache,
    parallelism: int,
) -> ScoreMatrix:
    pairs = [(doc, thought) for doc in docs for thought in layer.thoughts]
    if not pairs:
        return ScoreMatrix()

    def work(pair):
        doc, thought = pair
        return cache.get_or_compute(doc.id, thought, lambda: providers.score(doc, thought, query))

    if parallelism == 1 or len(pairs) == 1:
        values = [work(pair) for pair in pairs]
    else:
        with ThreadPoolExecutor(max_workers=min(parallelism, len(pairs))) as pool:
            values = list(pool.map(work, pairs))
    return ScoreMatrix({(doc.id, thought.id): value for (doc, thought), value in zip(pairs, values)})


def run_layer(
    docs: Sequence[Document],
    layer: LayerSpec,
    providers: ProviderRegistry,
    query: str = "",
    cache: Optional[ScoreCache] = None,
    parallelism: Optional[int] = None,
) -> Tuple[List[Document], LayerRecord]:
    """Score, aggregate and, when nothing survives, backtrack through the refine hook."""

    cache = cache if cache is not None else ScoreCache()
    workers = _parallelism(parallelism)
    by_id: Dict[str, Document] = {doc.id: doc for doc in docs}
    inputs = tuple(doc.id for doc in docs)
    current = layer
    events: List[BacktrackEvent] = []
    start = time.perf_counter()
    for attempt in range(1, layer.retries + 2):
        try:
            matrix = score_layer(docs, current, providers, query, cache, workers)
            outcome = apply_metric(inputs, matrix, current)
        except LayerError:
            raise
        except ThoughtRankError as exc:
            _log(logging.ERROR, f"Layer {layer.label} failed on attempt {attempt}: {exc}")
            raise LayerError(layer.label, exc) from exc
        if outcome.survivors or not docs:
            break
        if attempt > layer.retries:
            _log(logging.WARNING, f"Layer {layer.label} kept nothing; retry budget {layer.retries} exhausted")
            break
        refined = current.refine.refine(current, attempt, query) if current.refine is not None else None
        if refined is None:
            _log(logging.WARNING, f"Layer {layer.label} kept nothing and has no refinement to try")
            break
        events.append(BacktrackEvent(attempt, tuple(t.criterion or t.id for t in refined.thoughts)))
        _log(logging.INFO, f"Layer {layer.label} backtracking (attempt {attempt + 1})")
        current = refined
    log_duration(f"pipeline.layer {layer.label}", (time.perf_counter() - start) * 1000.0,
                 threshold_ms=LAYER_WARN_MS, details=f"{len(inputs)} -> {len(outcome.survivors)}")
    record = LayerRecord(
        index=current.index,
        name=current.name,
        metric=current.metric,
        comparator=current.comparator,
        inputs=inputs,
        levels=current.levels,
        matrix=matrix,
        survivors=outcome.survivors,
        ranking=outcome.ranking,
        backtracks=tuple(events),
        flagged=bool(docs) and not outcome.survivors,
        truncated=outcome.truncated,
    )
    return [by_id[d] for d in outcome.survivors], record


def terminal_output(record: Optional[LayerRecord], survivors: Sequence[str]) -> RankedOutput:
    if record is not None and record.metric.is_rank:
        depths = dense_tiers(record.ranking)
        k = depths[survivors[-1]] + 1 if survivors else 1
        return RankedOutput(tuple(survivors), depths, k, tuple(d for d, _ in record.ranking))
    return RankedOutput(tuple(survivors), {d: 0 for d in survivors}, 1, tuple(survivors))


@timed("pipeline.run", warn_threshold_ms=120000)
def run_pipeline(
    config: Union["PipelineConfig", Sequence[LayerSpec]],
    corpus: Sequence[Document],
    query: str,
    providers: ProviderRegistry,
    expand: Optional[ExpandHook] = None,
    initiator: Optional[Initiator] = None,
    cache: Optional[ScoreCache] = None,
    parallelism: Optional[int] = None,
) -> Tuple[RankedOutput, PipelineTrace]:
    """Feed each layer's survivors to the next; the first layer sees the corpus.

    A failing layer raises :class:`LayerError` whose ``trace`` holds the
    records of the layers that completed.
    """

    layers: Sequence[LayerSpec] = getattr(config, "layers", config)
    cache = cache if cache is not None else ScoreCache()
    trace = PipelineTrace(query)
    for layer in layers:
        if layer.generate is not None and initiator is None:
            raise ConfigurationError(f"layer {layer.label} generates its thoughts but no chat model is configured")
        for thought in layer.thoughts:
            providers.check(thought)
    pending = list(layers)
    survivors: List[Document] = list(corpus)
    position = 0
    record: Optional[LayerRecord] = None
    while pending:
        position += 1
        layer = pending.pop(0).reindexed(position)
        try:
            if layer.generate is not None:
                layer = initiator(layer, query).reindexed(position)
                for thought in layer.thoughts:
                    providers.check(thought)
            survivors, record = run_layer(survivors, layer, providers, query, cache, parallelism)
        except LayerError as exc:
            trace.error = str(exc)
            exc.trace = trace
            raise
        except ThoughtRankError as exc:
            trace.error = f"layer {layer.label}: {exc}"
            raise LayerError(layer.label, exc, trace) from exc
        trace.layers.append(record)
        _log(logging.INFO, f"Layer {layer.label} ({layer.metric.label}) kept {len(survivors)} of {len(record.inputs)}")
        if expand is not None:
            extra = list(expand(record, survivors))
            if extra:
                _log(logging.INFO, f"Layer {layer.label} expanded with {len(extra)} layer(s)")
                pending[0:0] = extra
    output = terminal_output(record, [doc.id for doc in survivors])
    trace.output = output
    _log(logging.INFO, f"Pipeline kept {len(output.survivors)} of {len(corpus)} documents "
                       f"(cache {cache.hits} hits, {cache.misses} misses)")
    return output, trace
