"""Prompt templates and the strict parsers for their reply contracts.

Each template renders a system and a user message from the query, the
criterion and the document text. Three reply contracts exist:

* ``yes-no``: the reply is YES or NO (case-insensitive, optional trailing
  full stop), mapped to 1 and 0.
* ``score``: the reply contains a line ``Score: N`` or a bare integer line
  with ``0 <= N <= 100``; the first such line wins.
* ``lines``: one item per non-empty line, list markers stripped.

The normativeness rubric is written for this project; no published rubric
exists for that judgement.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List

from ..common import ConfigurationError
from .base import ProviderError

YES_NO = "yes-no"
SCORE = "score"
LINES = "lines"

_SCORE_LINE = re.compile(r"^\s*(?:score\s*[:=]\s*)?(\d{1,3})\s*$", re.IGNORECASE)
_LIST_MARKER = re.compile(r"^\s*(?:[-*•]|\d+[.)])\s*")


class ResponseParseError(ProviderError):
    def __init__(self, template: str, raw: str) -> None:
        self.template = template
        self.raw = raw
        super().__init__(f"reply to template {template!r} does not follow its contract: {raw!r}")


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    contract: str
    system: str
    user: str

    def render(self, query: str = "", criterion: str = "", document: str = "", count: int = 0) -> List[Dict[str, str]]:
        values = {"query": query, "criterion": criterion, "document": document, "count": count}
        return [
            {"role": "system", "content": self.system.format(**values)},
            {"role": "user", "content": self.user.format(**values)},
        ]

    def parse_score(self, raw: str) -> float:
        if self.contract == YES_NO:
            answer = raw.strip().rstrip(".").strip().casefold()
            if answer == "yes":
                return 1.0
            if answer == "no":
                return 0.0
            raise ResponseParseError(self.id, raw)
        if self.contract == SCORE:
            for line in raw.splitlines():
                match = _SCORE_LINE.match(line)
                if match and 0 <= int(match.group(1)) <= 100:
                    return float(match.group(1))
            raise ResponseParseError(self.id, raw)
        raise ConfigurationError(f"template {self.id!r} does not produce scores")

    def parse_lines(self, raw: str) -> List[str]:
        if self.contract != LINES:
            raise ConfigurationError(f"template {self.id!r} does not produce item lists")
        items = [_LIST_MARKER.sub("", line).strip() for line in raw.splitlines()]
        items = [item for item in items if item]
        if not items:
            raise ResponseParseError(self.id, raw)
        return items


_JUDGE = "You are a careful legal research assistant. Follow the answer format exactly."

TEMPLATES: Dict[str, PromptTemplate] = {
    t.id: t
    for t in (
        PromptTemplate(
            "confirm",
            YES_NO,
            _JUDGE,
            "Query: {query}\n\nDocument: {document}\n\n"
            "Is the document relevant to the query? Answer YES or NO only.",
        ),
        PromptTemplate(
            "criterion",
            YES_NO,
            _JUDGE,
            "Query: {query}\n\nCriterion: {criterion}\n\nDocument: {document}\n\n"
            "Does the document satisfy the criterion with respect to the query? Answer YES or NO only.",
        ),
        PromptTemplate(
            "normativeness",
            SCORE,
            _JUDGE,
            "Rate how normative the sentence is on a scale from 0 to 100. A sentence is normative when it states, "
            "adds to, clarifies or interprets a rule of conduct. 0 means purely descriptive facts of a case, "
            "50 means an opinion about conduct without a general rule, 100 means an explicit general rule.\n\n"
            "Sentence: {document}\n\nReply with one line of the form Score: N.",
        ),
        PromptTemplate(
            "relevance-score",
            SCORE,
            _JUDGE,
            "Query: {query}\n\nCriterion: {criterion}\n\nDocument: {document}\n\n"
            "Rate from 0 to 100 how well the document meets the criterion for the query. "
            "Reply with one line of the form Score: N.",
        ),
        PromptTemplate(
            "suggest-keywords",
            LINES,
            _JUDGE,
            "Query: {query}\n\nList {count} keywords a relevant document would contain, one per line.",
        ),
        PromptTemplate(
            "suggest-criteria",
            LINES,
            _JUDGE,
            "Query: {query}\n\nList {count} conditions a relevant document must meet, in order of importance, "
            "one per line.",
        ),
        PromptTemplate(
            "refine-criteria",
            LINES,
            _JUDGE,
            "Query: {query}\n\nNo document met all of these conditions:\n{criterion}\n\n"
            "Rewrite them as {count} less restrictive conditions, one per line.",
        ),
    )
}


def get_template(template_id: str) -> PromptTemplate:
    try:
        return TEMPLATES[template_id]
    except KeyError:
        raise ConfigurationError(f"unknown prompt template {template_id!r}") from None
