"""Precision, recall and F2 per query, with macro averages.

Conventions for empty denominators: precision is 0 when nothing was
retrieved; F2 is 0 when precision and recall are both 0.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Collection, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .common import ThoughtRankError

RunPair = Tuple[Collection[str], Collection[str]]


class EvaluationError(ThoughtRankError):
    category = "evaluation"


@dataclass(frozen=True)
class QueryScores:
    query: str
    precision: float
    recall: float
    f2: float
    retrieved: int = 0
    relevant: int = 0


@dataclass(frozen=True)
class EvalReport:
    rows: Tuple[QueryScores, ...]
    macro: Tuple[float, float, float]
    baselines: Mapping[str, "EvalReport"] = field(default_factory=dict)

    def with_baselines(self, baselines: Mapping[str, "EvalReport"]) -> "EvalReport":
        return EvalReport(self.rows, self.macro, dict(baselines))


def f2_score(precision: float, recall: float) -> float:
    if precision == 0 and recall == 0:
        return 0.0
    return 5.0 * precision * recall / (4.0 * precision + recall)


def score_query(query: str, retrieved: Collection[str], relevant: Collection[str]) -> QueryScores:
    relevant_set = set(relevant)
    if not relevant_set:
        raise EvaluationError(f"query {query!r} has no relevant documents")
    retrieved_set = set(retrieved)
    hits = len(retrieved_set & relevant_set)
    precision = hits / len(retrieved_set) if retrieved_set else 0.0
    recall = hits / len(relevant_set)
    return QueryScores(query, precision, recall, f2_score(precision, recall), len(retrieved_set), len(relevant_set))


def compute_metrics(runs: Mapping[str, RunPair]) -> EvalReport:
    """``runs`` maps a query id to its (retrieved, relevant) pair."""

    rows = tuple(score_query(query, retrieved, relevant) for query, (retrieved, relevant) in runs.items())
    if not rows:
        raise EvaluationError("no queries to evaluate")
    count = float(len(rows))
    macro = (
        sum(r.precision for r in rows) / count,
        sum(r.recall for r in rows) / count,
        sum(r.f2 for r in rows) / count,
    )
    return EvalReport(rows, macro)


def _read_jsonl(path: str, what: str) -> List[dict]:
    records: List[dict] = []
    try:
        with open(path, "r", encoding="utf-8") as stream:
            for number, raw in enumerate(stream, start=1):
                if not raw.strip():
                    continue
                try:
                    record = json.loads(raw)
                except ValueError as exc:
                    raise EvaluationError(f"{path}:{number}: malformed {what} record: {exc}") from None
                if not isinstance(record, dict):
                    raise EvaluationError(f"{path}:{number}: {what} record must be an object")
                records.append(record)
    except OSError as exc:
        raise EvaluationError(f"cannot read {what} file {path}: {exc.strerror or exc}") from None
    return records


def load_gold(path: str) -> Dict[str, List[str]]:
    """Records ``{"query": id, "relevant": [doc ids]}``."""

    gold: Dict[str, List[str]] = {}
    for record in _read_jsonl(path, "gold"):
        try:
            gold[str(record["query"])] = [str(d) for d in record["relevant"]]
        except (KeyError, TypeError):
            raise EvaluationError(f"{path}: gold records need 'query' and 'relevant'") from None
    return gold


def load_predictions(path: str, query: Optional[str] = None) -> Dict[str, List[str]]:
    """Either ``{"query", "retrieved"}`` records or a result file for one query."""

    records = _read_jsonl(path, "prediction")
    if records and all("retrieved" in r for r in records):
        return {str(r["query"]): [str(d) for d in r["retrieved"]] for r in records}
    if all("id" in r for r in records):
        if query is None:
            raise EvaluationError(f"{path} is a result file; name its query with --query-id")
        return {query: [str(r["id"]) for r in sorted(records, key=lambda r: r.get("rank", 0))]}
    raise EvaluationError(f"{path}: prediction records need 'retrieved' lists or result 'id' fields")


def pair_runs(predictions: Mapping[str, Sequence[str]], gold: Mapping[str, Sequence[str]]) -> Dict[str, RunPair]:
    """Gold decides the query set; a query without predictions retrieved nothing."""

    unknown = sorted(set(predictions) - set(gold))
    if unknown:
        raise EvaluationError(f"predictions for queries missing from gold: {', '.join(unknown)}")
    return {query: (predictions.get(query, ()), relevant) for query, relevant in gold.items()}


def evaluate_files(
    predictions_path: str,
    gold_path: str,
    query: Optional[str] = None,
    baselines: Iterable[Tuple[str, str]] = (),
) -> EvalReport:
    gold = load_gold(gold_path)
    if query is None and len(gold) == 1:
        query = next(iter(gold))
    report = compute_metrics(pair_runs(load_predictions(predictions_path, query), gold))
    extra = {
        name: compute_metrics(pair_runs(load_predictions(path, query), gold)) for name, path in baselines
    }
    return report.with_baselines(extra) if extra else report
