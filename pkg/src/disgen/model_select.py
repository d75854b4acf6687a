"""Model selection across metric reports by per-metric win counting.

Each metric row marks every report achieving the best value in the metric's
better-direction; reports are ranked by how many rows they win. Ties share a
rank and are reported, never broken. Rows where any report lacks the metric
(NA) are shown but not ranked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .metrics import MAIN_METRIC_ROWS, MetricReport, ModeStat


class ModelSelectError(Exception):
    pass


@dataclass(frozen=True)
class MetricRow:
    label: str
    direction: str  # "up" | "down"
    values: tuple  # one per report, None = NA
    winners: tuple[int, ...]  # report indices winning this row; empty if unranked


@dataclass
class SelectionResult:
    names: tuple[str, ...]
    rows: list[MetricRow]
    wins: tuple[int, ...]
    ranking: list[tuple[int, str, int]]  # (rank, name, wins), best first

    def format_table(self) -> str:
        width = max(len(r.label) for r in self.rows) + 2
        col = max(12, max(len(n) for n in self.names) + 2)
        lines = ["".ljust(width) + "".join(n.ljust(col) for n in self.names)]
        for row in self.rows:
            cells = []
            for i, v in enumerate(row.values):
                text = _fmt_value(v)
                if i in row.winners:
                    text += " *"
                cells.append(text.ljust(col))
            arrow = "^" if row.direction == "up" else "v"
            lines.append(f"{row.label} {arrow}".ljust(width) + "".join(cells))
        lines.append("")
        lines.append("wins".ljust(width) + "".join(str(w).ljust(col) for w in self.wins))
        lines.append("ranking: " + ", ".join(f"#{r} {n} ({w} wins)" for r, n, w in self.ranking))
        return "\n".join(lines)


def _fmt_value(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, tuple):
        return f"{v[0]:.2f} ({v[1]:.2f}%)"
    return f"{v:.2f}"


def _comparable(report: MetricReport, field_name: str):
    value = getattr(report, field_name)
    if value is None:
        return None
    if isinstance(value, ModeStat):
        return (value.value, value.share)  # compare share when values tie
    return value


def model_select(named_reports: Sequence[tuple[str, MetricReport]]) -> SelectionResult:
    if len(named_reports) < 2:
        raise ModelSelectError("need at least 2 reports to compare")
    names = tuple(name for name, _ in named_reports)
    reports = [report for _, report in named_reports]

    rows: list[MetricRow] = []
    wins = [0] * len(reports)
    for field_name, label, direction in MAIN_METRIC_ROWS:
        values = tuple(_comparable(r, field_name) for r in reports)
        if any(v is None for v in values):
            rows.append(MetricRow(label=label, direction=direction, values=values, winners=()))
            continue
        best = max(values) if direction == "up" else min(values)
        winners = tuple(i for i, v in enumerate(values) if v == best)
        for i in winners:
            wins[i] += 1
        rows.append(MetricRow(label=label, direction=direction, values=values, winners=winners))

    order = sorted(range(len(reports)), key=lambda i: (-wins[i], names[i]))
    ranking: list[tuple[int, str, int]] = []
    rank = 0
    prev_wins: int | None = None
    for pos, i in enumerate(order, start=1):
        if wins[i] != prev_wins:
            rank = pos
            prev_wins = wins[i]
        ranking.append((rank, names[i], wins[i]))
    return SelectionResult(names=names, rows=rows, wins=tuple(wins), ranking=ranking)
