# Shared helpers for running the suite outside an installed package
import os
import random
import sys
from typing import Dict, List, Optional, Sequence, Tuple
from unittest.mock import MagicMock

# Add the application directory to sys.path
APP_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
sys.path.insert(0, APP_DIR)

from resources.lib.core.hierarchy import (  # noqa: E402
    Aggregator,
    ComparatorSpec,
    Hierarchy,
    OptionThought,
    ScoreMatrix,
    Slot,
)
from resources.lib.pipeline.layers import AggregationMetric, LayerSpec  # noqa: E402
from resources.lib.providers.base import ProviderBinding  # noqa: E402

FIXTURES = os.path.join(APP_DIR, "resources", "fixtures")
CIVIL_LAW = os.path.join(FIXTURES, "civil_law")
NORMATIVE = os.path.join(FIXTURES, "normative")

TABLE = ProviderBinding("table", {})
AGGREGATORS = list(Aggregator)


def thought(tid: str, layer: int = 1, level: int = 1, weight: float = 1.0, binary: bool = False,
            provider: Optional[ProviderBinding] = TABLE, criterion: str = "") -> OptionThought:
    return OptionThought(tid, layer, level, weight, criterion, binary, provider)


def matrix(rows: Dict[str, Sequence[float]], ids: Sequence[str]) -> ScoreMatrix:
    """``rows`` maps a document to its scores in ``ids`` order."""

    return ScoreMatrix({(doc, tid): float(v) for doc, values in rows.items() for tid, v in zip(ids, values)})


def hierarchy(*slots: Sequence[str], comparator: ComparatorSpec = ComparatorSpec()) -> Hierarchy:
    """One layer whose levels are the given id groups."""

    return Hierarchy(tuple(
        Slot(1, level, tuple(thought(tid, 1, level) for tid in ids), comparator)
        for level, ids in enumerate(slots, start=1)
    ))


def table_layer(index: int, levels: Sequence[Sequence[str]], metric: AggregationMetric,
                comparator: ComparatorSpec = ComparatorSpec(), binary: bool = True, name: str = "",
                weights: Optional[Dict[str, float]] = None, **kwargs) -> LayerSpec:
    weights = weights or {}
    built = tuple(
        tuple(thought(tid, index, level, weights.get(tid, 1.0), binary) for tid in ids)
        for level, ids in enumerate(levels, start=1)
    )
    return LayerSpec(index, built, metric, comparator, name, **kwargs)


def random_comparator(rng: random.Random) -> ComparatorSpec:
    if rng.random() < 0.5:
        return ComparatorSpec.local()
    return ComparatorSpec.global_(rng.choice(AGGREGATORS))


def random_instance(rng: random.Random, docs: int = 6, max_slots: int = 3, max_width: int = 3,
                    values: Sequence[float] = (0, 1, 2, 3), comparator: Optional[ComparatorSpec] = None
                    ) -> Tuple[List[str], ScoreMatrix, Hierarchy]:
    """Random documents, a one-layer hierarchy and a complete matrix over small integer scores."""

    slots = []
    counter = 0
    for level in range(1, rng.randint(1, max_slots) + 1):
        ids = []
        for _ in range(rng.randint(1, max_width)):
            counter += 1
            ids.append(thought(f"t{counter}", 1, level, weight=rng.choice((0.5, 1.0, 2.0))))
        slots.append(Slot(1, level, tuple(ids), comparator or random_comparator(rng)))
    h = Hierarchy(tuple(slots))
    names = [f"d{i}" for i in range(1, rng.randint(2, docs) + 1)]
    m = ScoreMatrix({(d, t.id): float(rng.choice(values)) for d in names for t in h.thoughts})
    return names, m, h


# Independent reference implementation used as an oracle.

def _oracle_value(m: ScoreMatrix, doc: str, slot: Slot) -> float:
    scores = [(t.weight, m.get(doc, t.id)) for t in slot.thoughts]
    name = slot.comparator.aggregator.value
    if name == "weighted-sum":
        return sum(w * s for w, s in scores)
    if name == "worst-case":
        return min(w * s for w, s in scores)
    return sum(w * s ** 2 for w, s in scores)


def oracle_better(m: ScoreMatrix, a: str, b: str, h: Hierarchy) -> bool:
    """True when ``a`` strictly dominates ``b``."""

    for slot in h.slots:
        if slot.comparator.is_global:
            va, vb = _oracle_value(m, a, slot), _oracle_value(m, b, slot)
            if va != vb:
                return va > vb
            continue
        diffs = [m.get(a, t.id) - m.get(b, t.id) for t in slot.thoughts]
        if all(x == 0 for x in diffs):
            continue
        return all(x >= 0 for x in diffs)
    return False


def oracle_depths(docs: Sequence[str], m: ScoreMatrix, h: Hierarchy) -> Dict[str, int]:
    memo: Dict[str, int] = {}

    def depth(d: str) -> int:
        if d not in memo:
            memo[d] = max((depth(e) + 1 for e in docs if e != d and oracle_better(m, e, d, h)), default=0)
        return memo[d]

    return {d: depth(d) for d in docs}


def chat_response(content: str, status: int = 200) -> MagicMock:
    response = MagicMock()
    response.status_code = status
    response.json.return_value = {"choices": [{"message": {"role": "assistant", "content": content}}]}
    response.raise_for_status.return_value = None
    return response
