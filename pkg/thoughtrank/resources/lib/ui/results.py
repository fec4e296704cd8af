"""Result files: one JSON record per retrieved document."""
from __future__ import annotations

import json
import os
from typing import Any, Dict, List, Mapping, Optional, Sequence

from ..common import ConfigurationError
from ..core.explain import Explanation
from ..core.hierarchy import ScoreMatrix
from ..core.ranking import RankedOutput


def result_records(
    output: RankedOutput,
    matrix: ScoreMatrix,
    explanations: Optional[Mapping[str, Explanation]] = None,
    top_k: Optional[int] = None,
) -> List[Dict[str, Any]]:
    """Records in output order (ascending depth, then input order).

    ``top_k`` keeps every survivor of depth below it, so a tier is never split.
    """

    rows = matrix.nested()
    docs = output.survivors
    if top_k is not None:
        docs = tuple(d for d in docs if output.depths.get(d, 0) < top_k)
    records = []
    for rank, doc in enumerate(docs, start=1):
        explanation = explanations.get(doc) if explanations else None
        records.append({
            "rank": rank,
            "id": doc,
            "depth": output.depths.get(doc, 0),
            "scores": rows.get(doc, {}),
            "explanation": explanation.to_dict() if explanation is not None else None,
        })
    return records


def dumps_records(records: Sequence[Mapping[str, Any]]) -> str:
    return "".join(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n" for r in records)


def write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8") as stream:
            stream.write(text)
    except OSError as exc:
        raise ConfigurationError(f"cannot write output: {exc.strerror or exc}", path=path) from None


def write_results(
    path: str,
    output: RankedOutput,
    matrix: ScoreMatrix,
    explanations: Optional[Mapping[str, Explanation]] = None,
    top_k: Optional[int] = None,
) -> int:
    records = result_records(output, matrix, explanations, top_k)
    write_text(path, dumps_records(records))
    return len(records)
