"""Evaluation report rendering as aligned text or CSV."""
from __future__ import annotations

import csv
import io
from typing import Callable, List

from ..evaluation import EvalReport

HEADER = (
    "# precision = |retrieved & relevant| / |retrieved| (0 when nothing is retrieved)",
    "# recall = |retrieved & relevant| / |relevant|",
    "# F2 = 5PR / (4P + R) (0 when P = R = 0); macro = mean over queries",
)


def _rows(report: EvalReport, fmt: Callable[[float], str]) -> List[List[str]]:
    rows = [[r.query, fmt(r.precision), fmt(r.recall), fmt(r.f2)] for r in report.rows]
    rows.append(["macro"] + [fmt(v) for v in report.macro])
    for name in sorted(report.baselines):
        rows.append([f"baseline:{name}"] + [fmt(v) for v in report.baselines[name].macro])
    return rows


def render_text(report: EvalReport) -> str:
    rows = [["query", "precision", "recall", "F2"]] + _rows(report, lambda v: f"{v:.4f}")
    width = max(len(row[0]) for row in rows)
    lines = list(HEADER)
    for row in rows:
        lines.append("  ".join([row[0].ljust(width)] + [cell.rjust(9) for cell in row[1:]]))
    return "\n".join(lines) + "\n"


def render_csv(report: EvalReport) -> str:
    buffer = io.StringIO()
    buffer.write("".join(line + "\n" for line in HEADER))
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["query", "precision", "recall", "f2"])
    # full precision so F2 can be recomputed from P and R
    writer.writerows(_rows(report, repr))
    return buffer.getvalue()


def render_report(report: EvalReport, fmt: str = "text") -> str:
    return render_csv(report) if fmt == "csv" else render_text(report)
