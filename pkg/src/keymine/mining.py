"""Apriori frequent-itemset mining and strong-association-rule generation.

Works over a generic in-memory transaction database. Itemsets are kept as
tuples in canonical universe order so the level-wise join's shared-prefix
condition is well defined. The miner performs exactly one full scan of the
database per level; `brute_force_frequent` is the independent exponential
oracle used to cross-check it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .corpus import NGraphTable


class UniverseError(ValueError):
    """An itemset or transaction mentions an item outside the universe."""


class UniverseTooLargeError(ValueError):
    """Brute-force enumeration refused: the universe is too big."""


class MiningInvariantError(RuntimeError):
    """Internal inconsistency, e.g. a frequent itemset with an uncounted subset."""


class Transaction(NamedTuple):
    tid: str
    items: tuple[str, ...]


@dataclass
class TransactionDB:
    """Set of item transactions; items within a transaction are deduplicated
    and stored in universe order."""

    universe: tuple[str, ...]
    transactions: list[Transaction]

    def __len__(self) -> int:
        return len(self.transactions)

    @classmethod
    def build(
        cls,
        universe: Sequence[str],
        transactions: Iterable[tuple[str, Iterable[str]]],
    ) -> "TransactionDB":
        """Canonicalize raw (tid, items) pairs against the given universe."""
        universe = tuple(universe)
        order = {item: i for i, item in enumerate(universe)}
        if len(order) != len(universe):
            raise ValueError("universe items must be unique")
        canon = []
        for tid, items in transactions:
            canon.append(Transaction(tid, _canonical(items, order, f"transaction {tid}")))
        return cls(universe=universe, transactions=canon)

    def order(self) -> dict[str, int]:
        return {item: i for i, item in enumerate(self.universe)}

    def support_count(self, items: Iterable[str]) -> int:
        """Number of transactions containing every given item."""
        needed = frozenset(items)
        return sum(1 for t in self.transactions if needed.issubset(t.items))


def _canonical(items: Iterable[str], order: dict[str, int], context: str) -> tuple[str, ...]:
    unique = set(items)
    for item in unique:
        if item not in order:
            raise UniverseError(f"{context}: item {item!r} is not in the universe")
    return tuple(sorted(unique, key=order.__getitem__))


@dataclass(frozen=True)
class MiningParams:
    """Thresholds for the miner. Support is an absolute transaction count.

    A confidence above 1.0 is permitted but unsatisfiable: it yields no rules.
    """

    min_support_count: int
    min_confidence: float

    def __post_init__(self) -> None:
        if self.min_support_count < 1:
            raise ValueError("min_support_count must be >= 1")
        if self.min_confidence < 0:
            raise ValueError("min_confidence must be >= 0")


class CountedItemset(NamedTuple):
    items: tuple[str, ...]
    support_count: int


@dataclass
class FrequentLevel:
    """One Apriori level: the frequent k-itemsets plus every candidate that
    was counted to produce them (retained for audit)."""

    k: int
    universe: tuple[str, ...]
    itemsets: tuple[CountedItemset, ...]
    candidates_evaluated: tuple[CountedItemset, ...]

    def counts(self) -> dict[tuple[str, ...], int]:
        return {ci.items: ci.support_count for ci in self.itemsets}


def count_supports(
    db: TransactionDB, candidates: Iterable[tuple[str, ...] | Iterable[str]]
) -> list[CountedItemset]:
    """Count, for each candidate itemset, the transactions containing it.

    One pass over the database: each transaction contributes by enumerating
    its own size-k subsets and bumping matching candidates, which is cheap
    for the short transactions this pipeline produces.
    """
    order = db.order()
    canon = [_canonical(c, order, "candidate") for c in candidates]
    counts: dict[tuple[str, ...], int] = {c: 0 for c in canon}
    sizes = sorted({len(c) for c in canon})
    for t in db.transactions:
        for k in sizes:
            if k > len(t.items):
                continue
            for sub in combinations(t.items, k):
                if sub in counts:
                    counts[sub] += 1
    return [CountedItemset(c, counts[c]) for c in sorted(counts, key=lambda c: _key(c, order))]


def _key(items: tuple[str, ...], order: dict[str, int]) -> tuple[int, ...]:
    return tuple(order[i] for i in items)


def generate_candidates(prev: FrequentLevel) -> list[tuple[str, ...]]:
    """Join the frequent (k-1)-itemsets with themselves, then prune.

    Two itemsets join when their first k-2 items agree and the last item of
    the first sorts before the last item of the second. A joined candidate
    survives pruning only if every (k-1)-subset of it is itself frequent.
    """
    order = {item: i for i, item in enumerate(prev.universe)}
    frequent = {ci.items for ci in prev.itemsets}
    members = sorted(frequent, key=lambda c: _key(c, order))
    joined = []
    for a_pos, l1 in enumerate(members):
        for l2 in members[a_pos + 1 :]:
            if l1[:-1] != l2[:-1]:
                continue
            if order[l1[-1]] < order[l2[-1]]:
                joined.append(l1 + (l2[-1],))
    return [
        cand
        for cand in joined
        if all(sub in frequent for sub in combinations(cand, len(cand) - 1))
    ]


def mine_frequent(db: TransactionDB, params: MiningParams) -> list[FrequentLevel]:
    """Level-wise search: L1, L2, ... until a level is empty or nothing joins.

    Exactly one full database scan per level. Returned levels contain only
    non-empty frequent sets; candidate counts are kept alongside for audit.
    """
    if not db.universe:
        raise ValueError("cannot mine a database with an empty universe")
    order = db.order()
    levels: list[FrequentLevel] = []
    candidates: list[tuple[str, ...]] = [(item,) for item in db.universe]
    k = 1
    while candidates:
        counted = count_supports(db, candidates)
        frequent = tuple(ci for ci in counted if ci.support_count >= params.min_support_count)
        if not frequent:
            break
        level = FrequentLevel(
            k=k,
            universe=db.universe,
            itemsets=frequent,
            candidates_evaluated=tuple(counted),
        )
        levels.append(level)
        candidates = generate_candidates(level)
        k += 1
    return levels


def brute_force_frequent(db: TransactionDB, params: MiningParams) -> list[FrequentLevel]:
    """Oracle miner: enumerate every non-empty subset of the universe.

    Exponential by design, so it refuses universes above 20 items. Support
    counting goes through plain per-transaction subset tests, a code path
    independent of `count_supports`.
    """
    if len(db.universe) > 20:
        raise UniverseTooLargeError(
            f"brute force over {len(db.universe)} items would enumerate "
            f"2^{len(db.universe)} subsets; limit is 20"
        )
    order = db.order()
    levels: list[FrequentLevel] = []
    for k in range(1, len(db.universe) + 1):
        counted = [
            CountedItemset(items, db.support_count(items))
            for items in combinations(db.universe, k)
        ]
        frequent = tuple(ci for ci in counted if ci.support_count >= params.min_support_count)
        if not frequent:
            break
        levels.append(
            FrequentLevel(
                k=k, universe=db.universe, itemsets=frequent, candidates_evaluated=tuple(counted)
            )
        )
    return levels


def frequent_map(levels: Iterable[FrequentLevel]) -> dict[tuple[str, ...], int]:
    """All frequent itemsets across levels with their support counts."""
    merged: dict[tuple[str, ...], int] = {}
    for level in levels:
        merged.update(level.counts())
    return merged


@dataclass(frozen=True)
class AssociationRule:
    """antecedent => consequent with support count(A∪B)/|D| and
    confidence count(A∪B)/count(A)."""

    antecedent: tuple[str, ...]
    consequent: tuple[str, ...]
    support: float
    confidence: float

    def __post_init__(self) -> None:
        if not self.antecedent or not self.consequent:
            raise ValueError("rule sides must be non-empty")
        if set(self.antecedent) & set(self.consequent):
            raise ValueError("rule sides must be disjoint")


def generate_rules(
    levels: Sequence[FrequentLevel], db_size: int, params: MiningParams
) -> list[AssociationRule]:
    """Emit every rule A => F\\A over frequent F meeting the confidence bar.

    Frequent itemsets here are tiny (k <= 3 in practice), so all non-empty
    proper subsets are enumerated directly.
    """
    if db_size <= 0:
        raise ValueError("db_size must be positive")
    counts = frequent_map(levels)
    rules: list[AssociationRule] = []
    for level in levels:
        if level.k < 2:
            continue
        for ci in level.itemsets:
            for r in range(1, len(ci.items)):
                for antecedent in combinations(ci.items, r):
                    count_a = counts.get(antecedent)
                    if count_a is None:
                        raise MiningInvariantError(
                            f"subset {antecedent!r} of frequent itemset {ci.items!r} "
                            "was never counted; levels are inconsistent"
                        )
                    confidence = ci.support_count / count_a
                    if confidence >= params.min_confidence:
                        consequent = tuple(x for x in ci.items if x not in antecedent)
                        rules.append(
                            AssociationRule(
                                antecedent=antecedent,
                                consequent=consequent,
                                support=ci.support_count / db_size,
                                confidence=confidence,
                            )
                        )
    return rules


def digraphs_as_transactions(table: NGraphTable) -> TransactionDB:
    """View each digraph occurrence as one transaction over unordered pairs.

    The itemset is {first, second}; a doubled letter yields a singleton
    transaction. Hand-switching benefit is direction-symmetric, so the
    directional statistics stay in the digraph table while the transaction
    view deliberately forgets order.
    """
    if table.n != 2:
        raise ValueError(f"digraph table required, got n={table.n}")
    present = {ch for pair in table.counts for ch in pair}
    universe = tuple(ch for ch in table.alphabet.letters if ch in present)
    order = {item: i for i, item in enumerate(universe)}
    transactions: list[Transaction] = []
    tid = 0
    for pair, count in sorted(table.counts.items(), key=lambda kv: _key(kv[0], order)):
        items = _canonical(pair, order, f"digraph {pair!r}")
        for _ in range(count):
            tid += 1
            transactions.append(Transaction(f"T{tid}", items))
    return TransactionDB(universe=universe, transactions=transactions)


class TransactionFormatError(ValueError):
    """Malformed transaction TSV."""


def read_transactions_tsv(path: str | Path, universe: Sequence[str] | None = None) -> TransactionDB:
    """Load a transaction DB from TSV: tid, space-separated item list.

    Unless given, the universe is the lexicographically sorted set of items.
    """
    path = Path(path)
    rows: list[tuple[str, list[str]]] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#") or line == "tid\titems":
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise TransactionFormatError(f"{path}:{lineno}: expected 2 tab-separated columns")
        tid, items = parts
        rows.append((tid, items.split()))
    if universe is None:
        universe = sorted({item for _, items in rows for item in items})
    return TransactionDB.build(universe, rows)


def write_transactions_tsv(db: TransactionDB, path: str | Path) -> None:
    lines = ["tid\titems"]
    lines += [f"{t.tid}\t{' '.join(t.items)}" for t in db.transactions]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_frequent_tsv(levels: Sequence[FrequentLevel], db_size: int, path: str | Path) -> None:
    lines = ["itemset\tcount\tsupport"]
    for level in levels:
        for ci in level.itemsets:
            lines.append(f"{' '.join(ci.items)}\t{ci.support_count}\t{ci.support_count / db_size:.6f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_rules_tsv(rules: Sequence[AssociationRule], path: str | Path) -> None:
    lines = ["antecedent\tconsequent\tsupport\tconfidence"]
    for rule in rules:
        lines.append(
            f"{' '.join(rule.antecedent)}\t{' '.join(rule.consequent)}"
            f"\t{rule.support:.6f}\t{rule.confidence:.6f}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
