"""Hand assignment and key placement.

Letters are assigned to hands greedily in frequency-rank order. The two
most frequent letters anchor opposite hands (rank 1 and 4 right, 2 and 3
left); every later letter is scored against the letters each hand already
owns — cumulative pair support and cumulative confidence toward each side
— and is sent to the hand OPPOSITE its stronger association, so that the
digraphs it participates in tend to alternate hands. The decision rule is
deliberately asymmetric: only a letter whose left support AND left
confidence both dominate goes right; every other case (clear right
association, mixed signals, exact ties) goes left.

Each hand's letters are then placed on physical key positions in
frequency order, cheapest position first.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

from .corpus import NGraphTable, monograph_ranking
from .mining import TransactionDB

HANDS = ("left", "right")
ROWS = ("home", "top", "bottom")
LAYERS = ("base", "shift")
FINGERS = (1, 2, 3, 4, "thumb")

TIE_POLICIES = ("left-biased", "balanced")


class UndefinedConfidenceError(ValueError):
    """Affinity requested for a letter that never occurs in the corpus."""


class MissingTraceError(ValueError):
    """A partition without a decision trace cannot be audited."""


class GeometryCapacityError(ValueError):
    """A hand was assigned more letters than it has key positions."""

    def __init__(self, hand: str, overflow: int, letters: Sequence[str]):
        self.hand = hand
        self.overflow = overflow
        self.letters = tuple(letters)
        super().__init__(
            f"{hand} hand has {overflow} more letter(s) than positions: "
            + " ".join(self.letters)
        )


class GeometryFormatError(ValueError):
    """Malformed geometry JSON."""


class LayoutFormatError(ValueError):
    """Malformed layout JSON."""


class HandAffinity(NamedTuple):
    """Cumulative pair support / confidence of one letter toward each hand's
    already-assigned letters."""

    letter: str
    left_support: float
    right_support: float
    left_confidence: float
    right_confidence: float


class TraceRecord(NamedTuple):
    rank: int
    letter: str
    left_support: float
    right_support: float
    left_confidence: float
    right_confidence: float
    hand: str


@dataclass
class HandPartition:
    """Letters split between hands, in assignment (frequency-rank) order,
    with the per-letter decision trace kept for audit."""

    left: list[str] = field(default_factory=list)
    right: list[str] = field(default_factory=list)
    trace: list[TraceRecord] = field(default_factory=list)
    tie_policy: str = "left-biased"

    @property
    def letters(self) -> set[str]:
        return set(self.left) | set(self.right)


@dataclass
class AuditResult:
    ok: bool
    message: str = ""
    rank: int | None = None
    letter: str | None = None

    def __bool__(self) -> bool:
        return self.ok


class _PairIndex:
    """Transaction-containment counts for single items and unordered pairs."""

    def __init__(self, db: TransactionDB):
        self.size = len(db)
        self.item_counts: Counter[str] = Counter()
        self.pair_counts: Counter[frozenset[str]] = Counter()
        for t in db.transactions:
            for item in t.items:
                self.item_counts[item] += 1
            for i, a in enumerate(t.items):
                for b in t.items[i + 1 :]:
                    self.pair_counts[frozenset((a, b))] += 1

    def cumulative(self, letter: str, assigned: Sequence[str]) -> tuple[float, float]:
        """Sum of pair supports and of confidences of letter toward a hand set."""
        if self.size == 0:
            return 0.0, 0.0
        denom = self.item_counts.get(letter, 0)
        support = 0.0
        confidence = 0.0
        for other in assigned:
            joint = self.pair_counts.get(frozenset((letter, other)), 0)
            support += joint / self.size
            if denom:
                confidence += joint / denom
        return support, confidence


def affinity(
    letter: str,
    assigned: HandPartition,
    db: TransactionDB,
    monograph: NGraphTable,
) -> HandAffinity:
    """Score one unassigned letter against the partition built so far.

    Support of a pair is the fraction of transactions containing both
    letters; confidence of letter=>other is that joint count over the count
    of transactions containing the letter. Rebuilds the pair index, so batch
    callers should use `assign_hands`, which indexes the database once.
    """
    if monograph.counts.get((letter,), 0) == 0:
        raise UndefinedConfidenceError(
            f"letter {letter!r} has zero monograph count; confidence is undefined"
        )
    return _affinity(letter, assigned, _PairIndex(db))


def _affinity(letter: str, assigned: HandPartition, index: _PairIndex) -> HandAffinity:
    ls, lc = index.cumulative(letter, assigned.left)
    rs, rc = index.cumulative(letter, assigned.right)
    return HandAffinity(letter, ls, rs, lc, rc)


# Rank -> hand for the first four letters; the top letter and the fourth
# anchor the right hand, the second and third the left.
_SEED_HANDS = {1: "right", 2: "left", 3: "left", 4: "right"}


def _decide(aff: HandAffinity, tie_policy: str, flip_state: list[bool]) -> str:
    toward_left = aff.left_support > aff.right_support and aff.left_confidence > aff.right_confidence
    if toward_left:
        return "right"
    if tie_policy == "left-biased":
        return "left"
    toward_right = aff.right_support > aff.left_support and aff.right_confidence > aff.left_confidence
    if toward_right:
        return "left"
    # Mixed signal under the balanced policy: alternate, starting left.
    hand = "right" if flip_state[0] else "left"
    flip_state[0] = not flip_state[0]
    return hand


def assign_hands(
    monograph: NGraphTable,
    db: TransactionDB,
    tie_policy: str = "left-biased",
) -> HandPartition:
    """Distribute every letter with a nonzero monograph count onto a hand.

    Letters are taken in descending frequency (ties by alphabet order).
    Ranks 1 and 4 seed the right hand, ranks 2 and 3 the left; from rank 5
    on, a letter goes right only when both its support and its confidence
    toward the left set strictly exceed those toward the right set,
    otherwise left. The `balanced` tie policy instead alternates the
    mixed-signal letters between hands. Every decision is recorded in the
    trace.
    """
    if tie_policy not in TIE_POLICIES:
        raise ValueError(f"tie_policy must be one of {TIE_POLICIES}, got {tie_policy!r}")
    ranking = monograph_ranking(monograph)
    if not ranking:
        raise ValueError("cannot assign hands: no letter has a nonzero count")
    index = _PairIndex(db)
    partition = HandPartition(tie_policy=tie_policy)
    flip_state = [False]
    for rank, row in enumerate(ranking, start=1):
        aff = _affinity(row.letter, partition, index)
        if rank in _SEED_HANDS:
            hand = _SEED_HANDS[rank]
        else:
            hand = _decide(aff, tie_policy, flip_state)
        (partition.left if hand == "left" else partition.right).append(row.letter)
        partition.trace.append(
            TraceRecord(
                rank,
                row.letter,
                aff.left_support,
                aff.right_support,
                aff.left_confidence,
                aff.right_confidence,
                hand,
            )
        )
    return partition


def audit_partition(
    partition: HandPartition, monograph: NGraphTable, db: TransactionDB
) -> AuditResult:
    """Replay every assignment decision and report the first divergence.

    Rebuilds the partition letter by letter from the trace, recomputes each
    affinity from the database, and checks that the recorded values match
    and that the decision rule produced the recorded hand. Passes only if
    the whole trace replays identically and the hand lists agree with it.
    """
    if not partition.trace:
        raise MissingTraceError("partition carries no trace; audit is impossible")
    ranking = monograph_ranking(monograph)
    if len(ranking) != len(partition.trace):
        return AuditResult(False, f"trace has {len(partition.trace)} records for {len(ranking)} ranked letters")
    index = _PairIndex(db)
    replay = HandPartition(tie_policy=partition.tie_policy)
    flip_state = [False]
    for rank, (row, rec) in enumerate(zip(ranking, partition.trace), start=1):
        if rec.rank != rank or rec.letter != row.letter:
            return AuditResult(
                False,
                f"trace rank {rec.rank} letter {rec.letter!r} does not match "
                f"ranking rank {rank} letter {row.letter!r}",
                rank,
                rec.letter,
            )
        aff = _affinity(rec.letter, replay, index)
        recorded = (rec.left_support, rec.right_support, rec.left_confidence, rec.right_confidence)
        if recorded != tuple(aff[1:]):
            return AuditResult(
                False,
                f"recorded affinities {recorded} differ from recomputed {tuple(aff[1:])}",
                rank,
                rec.letter,
            )
        if rank in _SEED_HANDS:
            expected = _SEED_HANDS[rank]
        else:
            expected = _decide(aff, partition.tie_policy, flip_state)
        if rec.hand != expected:
            return AuditResult(
                False,
                f"recorded hand {rec.hand!r} but the decision rule gives {expected!r}",
                rank,
                rec.letter,
            )
        (replay.left if expected == "left" else replay.right).append(rec.letter)
    if replay.left != partition.left or replay.right != partition.right:
        return AuditResult(False, "hand lists do not match the replayed trace")
    return AuditResult(True, "all decisions replay identically")


class KeyPosition(NamedTuple):
    position_id: str
    hand: str
    finger: int | str
    row: str
    layer: str
    cost: float


@dataclass
class KeyboardGeometry:
    """Physical key positions with per-position press costs.

    Treated as immutable after construction.
    """

    positions: list[KeyPosition]
    _by_id: dict[str, KeyPosition] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        by_id: dict[str, KeyPosition] = {}
        per_hand_base = {h: 0 for h in HANDS}
        for pos in self.positions:
            if pos.position_id in by_id:
                raise ValueError(f"duplicate position id {pos.position_id!r}")
            by_id[pos.position_id] = pos
            if pos.hand not in HANDS:
                raise ValueError(f"{pos.position_id}: hand must be one of {HANDS}")
            if pos.finger not in FINGERS:
                raise ValueError(f"{pos.position_id}: finger must be one of {FINGERS}")
            if pos.row not in ROWS:
                raise ValueError(f"{pos.position_id}: row must be one of {ROWS}")
            if pos.layer not in LAYERS:
                raise ValueError(f"{pos.position_id}: layer must be one of {LAYERS}")
            if not pos.cost > 0:
                raise ValueError(f"{pos.position_id}: cost must be strictly positive")
            if pos.layer == "base":
                per_hand_base[pos.hand] += 1
        for hand, n in per_hand_base.items():
            if n == 0:
                raise ValueError(f"geometry has no base-layer position for the {hand} hand")
        self._by_id = by_id

    def positions_for(self, hand: str) -> list[KeyPosition]:
        """A hand's positions, cheapest first; base layer wins cost ties."""
        return sorted(
            (p for p in self.positions if p.hand == hand),
            key=lambda p: (p.cost, LAYERS.index(p.layer)),
        )

    def by_id(self) -> dict[str, KeyPosition]:
        return self._by_id


_ROW_COST = {"home": 0.0, "top": 1.0, "bottom": 2.0}
_FINGER_COST = {1: 0.0, 2: 0.2, 3: 0.6, 4: 1.0}
# Column -> (hand, finger, lateral stretch). Columns 5 and 6 are the inner
# index-finger columns reached by stretching sideways.
_COLUMNS = {
    1: ("left", 4, 0.0),
    2: ("left", 3, 0.0),
    3: ("left", 2, 0.0),
    4: ("left", 1, 0.0),
    5: ("left", 1, 0.8),
    6: ("right", 1, 0.8),
    7: ("right", 1, 0.0),
    8: ("right", 2, 0.0),
    9: ("right", 3, 0.0),
    10: ("right", 4, 0.0),
}
_SHIFT_COST = 4.0


def default_geometry() -> KeyboardGeometry:
    """The shipped two-layer geometry: 3 rows x 10 columns per layer.

    Costs grow away from the home row and toward the weak fingers; every
    shift-layer position costs a flat 4.0 more than its base twin, so the
    base layer always fills first.
    """
    positions = []
    for layer in LAYERS:
        for row in ROWS:
            for col in range(1, 11):
                hand, finger, lateral = _COLUMNS[col]
                cost = 1.0 + _ROW_COST[row] + _FINGER_COST[finger] + lateral
                if layer == "shift":
                    cost += _SHIFT_COST
                positions.append(
                    KeyPosition(f"{layer}-{row}-{col:02d}", hand, finger, row, layer, cost)
                )
    return KeyboardGeometry(positions)


@dataclass
class Layout:
    """Injective letter -> position mapping over a geometry."""

    name: str
    geometry: KeyboardGeometry
    mapping: dict[str, str]

    def __post_init__(self) -> None:
        known = self.geometry.by_id()
        seen: dict[str, str] = {}
        for letter, pid in self.mapping.items():
            if pid not in known:
                raise ValueError(f"mapping[{letter!r}]: unknown position {pid!r}")
            if pid in seen:
                raise ValueError(
                    f"mapping[{letter!r}]: position {pid!r} already taken by {seen[pid]!r}"
                )
            seen[pid] = letter

    def hand_of(self, letter: str) -> str | None:
        pid = self.mapping.get(letter)
        if pid is None:
            return None
        return self.geometry.by_id()[pid].hand

    def hands_by_letter(self) -> dict[str, str]:
        """letter -> hand for every mapped letter; what evaluation scans need."""
        by_id = self.geometry.by_id()
        return {letter: by_id[pid].hand for letter, pid in self.mapping.items()}


def place_keys(
    partition: HandPartition, monograph: NGraphTable, geometry: KeyboardGeometry, name: str = "designed"
) -> Layout:
    """Map each hand's letters to its positions, frequency rank to cost rank.

    Partition lists are already in descending-frequency order, so the most
    frequent letter of each hand lands on that hand's cheapest position.
    """
    mapping: dict[str, str] = {}
    for hand, letters in (("left", partition.left), ("right", partition.right)):
        slots = geometry.positions_for(hand)
        if len(letters) > len(slots):
            raise GeometryCapacityError(hand, len(letters) - len(slots), letters[len(slots) :])
        for letter, pos in zip(letters, slots):
            mapping[letter] = pos.position_id
    return Layout(name=name, geometry=geometry, mapping=mapping)


_GEOMETRY_FIELDS = ("id", "hand", "finger", "row", "layer", "cost")


def load_geometry(path: str | Path) -> KeyboardGeometry:
    """Load a geometry file: a JSON array of position records."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise GeometryFormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise GeometryFormatError(f"{path}: expected a JSON array of positions")
    positions = []
    for i, rec in enumerate(data):
        if not isinstance(rec, dict):
            raise GeometryFormatError(f"{path}: positions[{i}]: expected an object")
        missing = [k for k in _GEOMETRY_FIELDS if k not in rec]
        if missing:
            raise GeometryFormatError(f"{path}: positions[{i}]: missing {', '.join(missing)}")
        positions.append(
            KeyPosition(
                str(rec["id"]), rec["hand"], rec["finger"], rec["row"], rec["layer"], rec["cost"]
            )
        )
    try:
        return KeyboardGeometry(positions)
    except ValueError as exc:
        raise GeometryFormatError(f"{path}: {exc}") from exc


def save_geometry(geometry: KeyboardGeometry, path: str | Path) -> None:
    data = [
        {
            "id": p.position_id,
            "hand": p.hand,
            "finger": p.finger,
            "row": p.row,
            "layer": p.layer,
            "cost": p.cost,
        }
        for p in geometry.positions
    ]
    Path(path).write_text(json.dumps(data, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def save_layout(layout: Layout, path: str | Path, geometry_ref: str) -> None:
    """Write a layout file; `geometry_ref` names the geometry JSON it expects
    to find next to itself (or an absolute path)."""
    data = {"name": layout.name, "geometry_ref": geometry_ref, "mapping": layout.mapping}
    Path(path).write_text(json.dumps(data, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def load_layout(path: str | Path, geometry: KeyboardGeometry | None = None) -> Layout:
    """Load a layout file, resolving its geometry_ref relative to the file.

    Pass `geometry` to override the reference (e.g. for third-party layout
    files shipped without their geometry).
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LayoutFormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise LayoutFormatError(f"{path}: expected a JSON object")
    required = ("name", "mapping") if geometry is not None else ("name", "geometry_ref", "mapping")
    for key in required:
        if key not in data:
            raise LayoutFormatError(f"{path}: missing field '{key}'")
    if not isinstance(data["mapping"], dict):
        raise LayoutFormatError(f"{path}: field 'mapping' must be an object")
    for letter, pid in data["mapping"].items():
        if not isinstance(pid, str):
            raise LayoutFormatError(f"{path}: mapping[{letter!r}] must be a position id string")
    if geometry is None:
        ref = Path(str(data["geometry_ref"]))
        geometry = load_geometry(ref if ref.is_absolute() else path.parent / ref)
    try:
        return Layout(name=str(data["name"]), geometry=geometry, mapping=dict(data["mapping"]))
    except ValueError as exc:
        raise LayoutFormatError(f"{path}: {exc}") from exc


def write_trace_tsv(partition: HandPartition, path: str | Path) -> None:
    """Export the decision trace: rank, letter, LS, RS, LC, RC, hand."""
    lines = ["rank\tletter\tleft_support\tright_support\tleft_confidence\tright_confidence\thand"]
    for rec in partition.trace:
        lines.append(
            f"{rec.rank}\t{rec.letter}\t{rec.left_support!r}\t{rec.right_support!r}"
            f"\t{rec.left_confidence!r}\t{rec.right_confidence!r}\t{rec.hand}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
