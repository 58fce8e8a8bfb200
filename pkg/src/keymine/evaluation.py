"""Scoring layouts against corpora: hand switching, hand loads, comparison.

One sequential scan per (stream, layout) pair. A token the layout does not
map — an undetermined corpus character or a letter missing from the layout
— is excluded from both loads and breaks the switching chain: no switch is
counted "across" an unknown keystroke.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .corpus import LetterStream
from .layout import Layout


class IncomparableReportsError(ValueError):
    """Reports over different character totals cannot share one table."""


@dataclass
class EvalReport:
    layout_name: str
    hand_switching: int
    left_load: int
    right_load: int
    undetermined: int
    total_chars: int

    def validate(self) -> None:
        if self.left_load + self.right_load + self.undetermined != self.total_chars:
            raise ValueError("loads plus undetermined must equal total characters")
        if self.hand_switching > max(0, self.left_load + self.right_load - 1):
            raise ValueError("more hand switches than adjacent typed pairs")


def evaluate(stream: LetterStream, layout: Layout) -> EvalReport:
    """Scan a tokenized stream and count loads and hand switches."""
    hands = layout.hands_by_letter()
    left = right = undetermined = switching = 0
    prev: str | None = None
    for tok in stream.tokens:
        hand = hands.get(tok.char) if tok.known else None
        if hand is None:
            undetermined += 1
            prev = None
            continue
        if hand == "left":
            left += 1
        else:
            right += 1
        if prev is not None and prev != hand:
            switching += 1
        prev = hand
    return EvalReport(
        layout_name=layout.name,
        hand_switching=switching,
        left_load=left,
        right_load=right,
        undetermined=undetermined,
        total_chars=len(stream.tokens),
    )


def evaluate_streams(streams: Iterable[LetterStream], layout: Layout) -> EvalReport:
    """Evaluate multiple independent sources; switching never crosses files."""
    total = EvalReport(layout.name, 0, 0, 0, 0, 0)
    for stream in streams:
        part = evaluate(stream, layout)
        total.hand_switching += part.hand_switching
        total.left_load += part.left_load
        total.right_load += part.right_load
        total.undetermined += part.undetermined
        total.total_chars += part.total_chars
    return total


class ComparisonRow(NamedTuple):
    layout_name: str
    hand_switching: int
    left_load: int
    right_load: int
    undetermined: int
    switching_ratio: float
    load_imbalance: float


@dataclass
class ComparisonTable:
    rows: list[ComparisonRow]


def compare(reports: Sequence[EvalReport]) -> ComparisonTable:
    """Rank reports by hand switching, best first; stable on ties.

    All reports must cover the same character total. Each output row adds
    two derived columns: switching ratio (switches per typed character)
    and load imbalance (|left - right| / typed characters).
    """
    if not reports:
        raise IncomparableReportsError("nothing to compare")
    totals = {r.total_chars for r in reports}
    if len(totals) > 1:
        raise IncomparableReportsError(
            f"reports cover different character totals: {sorted(totals)}"
        )
    rows = []
    for r in sorted(reports, key=lambda r: -r.hand_switching):
        typed = r.left_load + r.right_load
        rows.append(
            ComparisonRow(
                r.layout_name,
                r.hand_switching,
                r.left_load,
                r.right_load,
                r.undetermined,
                r.hand_switching / typed if typed else 0.0,
                abs(r.left_load - r.right_load) / typed if typed else 0.0,
            )
        )
    return ComparisonTable(rows)


def write_report_json(report: EvalReport, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(asdict(report), ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )


def read_report_json(path: str | Path) -> EvalReport:
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    try:
        return EvalReport(
            layout_name=str(data["layout_name"]),
            hand_switching=int(data["hand_switching"]),
            left_load=int(data["left_load"]),
            right_load=int(data["right_load"]),
            undetermined=int(data["undetermined"]),
            total_chars=int(data["total_chars"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: not a valid evaluation report: {exc}") from exc


_REPORT_COLUMNS = ("layout_name", "hand_switching", "left_load", "right_load", "undetermined", "total_chars")


def write_report_tsv(report: EvalReport, path: str | Path) -> None:
    d = asdict(report)
    lines = ["\t".join(_REPORT_COLUMNS), "\t".join(str(d[c]) for c in _REPORT_COLUMNS)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_comparison_tsv(table: ComparisonTable, path: str | Path) -> None:
    lines = [
        "layout_name\thand_switching\tleft_load\tright_load\tundetermined"
        "\tswitching_ratio\tload_imbalance"
    ]
    for row in table.rows:
        lines.append(
            f"{row.layout_name}\t{row.hand_switching}\t{row.left_load}\t{row.right_load}"
            f"\t{row.undetermined}\t{row.switching_ratio:.6f}\t{row.load_imbalance:.6f}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
