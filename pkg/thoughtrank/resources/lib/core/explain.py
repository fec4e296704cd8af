"""Explanation sets for pairwise preference, inclusion in the top tiers and exclusion.

An explanation lists, per hierarchy slot, the thoughts on which the preferred
document scores at least as high as the other one. When an included document
has no dominated counterpart in the next tier, the fallback set of its
positively scored thoughts is returned instead.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

from ..common import ContractError
from .hierarchy import ConsistencyError, Hierarchy, OptionThought, PartialOrdering, ScoreMatrix, hierarchical_compare
from .ranking import RankedOutput


@dataclass(frozen=True)
class Explanation:
    subject: str
    kind: str
    slots: Tuple[Tuple[str, ...], ...]
    other: Optional[str] = None
    k: Optional[int] = None
    fallback: bool = False
    hard: Tuple[str, ...] = ()

    @property
    def thoughts(self) -> Tuple[str, ...]:
        return tuple(t for slot in self.slots for t in slot)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subject": self.subject,
            "kind": self.kind,
            "other": self.other,
            "k": self.k,
            "fallback": self.fallback,
            "slots": [list(s) for s in self.slots],
            "hard": list(self.hard),
        }


def explain_pair(matrix: ScoreMatrix, d1: str, d2: str, hierarchy: Hierarchy) -> Explanation:
    slots = tuple(
        tuple(t.id for t in slot.thoughts if matrix.get(d1, t.id) >= matrix.get(d2, t.id))
        for slot in hierarchy.slots
    )
    return Explanation(subject=d1, kind="pairwise", slots=slots, other=d2)


def _pick_witness(candidates: Sequence[str], depths: Dict[str, int]) -> Optional[str]:
    if not candidates:
        return None
    return min(candidates, key=lambda d: (depths.get(d, 0), d))


def explain_included(
    matrix: ScoreMatrix,
    d: str,
    k: int,
    ranked: RankedOutput,
    hierarchy: Hierarchy,
    hard_thoughts: Sequence[OptionThought] = (),
) -> Explanation:
    depths = dict(ranked.depths)
    if d not in depths or depths[d] >= k:
        raise ContractError(f"document {d!r} is not within the top {k} tiers")
    next_tier = ranked.tier(k)
    dominated = [e for e in next_tier if hierarchical_compare(matrix, d, e, hierarchy) is PartialOrdering.BETTER]
    witness = _pick_witness(dominated, depths)
    if witness is not None:
        pair = explain_pair(matrix, d, witness, hierarchy)
        return Explanation(subject=d, kind="included", slots=pair.slots, other=witness, k=k)
    slots = tuple(tuple(t.id for t in slot.thoughts if matrix.get(d, t.id) > 0) for slot in hierarchy.slots)
    hard = tuple(t.id for t in hard_thoughts if (d, t.id) in matrix and matrix.get(d, t.id) > 0)
    return Explanation(subject=d, kind="included", slots=slots, k=k, fallback=True, hard=hard)


def explain_excluded(
    matrix: ScoreMatrix, d: str, k: int, ranked: RankedOutput, hierarchy: Hierarchy
) -> Explanation:
    if d not in ranked.considered:
        raise ContractError(f"document {d!r} was not among the ranked documents")
    if d in ranked.depths and ranked.depths[d] < k:
        raise ContractError(f"document {d!r} is within the top {k} tiers")
    included = ranked.within(k)
    dominating = [e for e in included if hierarchical_compare(matrix, e, d, hierarchy) is PartialOrdering.BETTER]
    witness = _pick_witness(dominating, dict(ranked.depths))
    if witness is None:
        raise ConsistencyError(f"no document within the top {k} tiers dominates excluded document {d!r}")
    pair = explain_pair(matrix, witness, d, hierarchy)
    return Explanation(subject=d, kind="excluded", slots=pair.slots, other=witness, k=k)
