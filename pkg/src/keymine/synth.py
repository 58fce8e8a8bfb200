"""Seeded synthetic corpora and transaction databases.

Everything here is a pure function of its seed — no wall-clock or OS
entropy — so tests and fixtures built on top are reproducible.
"""

from __future__ import annotations

import random
import string
from typing import Sequence

from .corpus import AlphabetConfig
from .mining import TransactionDB


def random_text(
    letters: Sequence[str],
    length: int,
    seed: int,
    *,
    weights: Sequence[float] | None = None,
    space_prob: float = 0.0,
    junk: str = "",
    junk_prob: float = 0.0,
) -> str:
    """Weighted random letter soup with optional spaces and junk characters.

    Junk characters (digits, punctuation) land outside the alphabet and so
    become undetermined tokens; spaces vanish during tokenization.
    """
    rng = random.Random(seed)
    out = []
    for _ in range(length):
        roll = rng.random()
        if junk and roll < junk_prob:
            out.append(rng.choice(junk))
        elif space_prob and roll < junk_prob + space_prob:
            out.append(" ")
        else:
            out.append(rng.choices(letters, weights=weights, k=1)[0])
    return "".join(out)


def zipf_weights(n: int) -> list[float]:
    return [1.0 / k for k in range(1, n + 1)]


def letters_alphabet(letters: str, name: str = "synthetic") -> AlphabetConfig:
    return AlphabetConfig(name=name, letters=tuple(letters))


# Two-group corpus: within-group frequency weights are spaced so the top
# ranked letter and the fourth come from group one and ranks two and three
# from group two, regardless of seed, at the default length.
GROUP_ONE = "abcde"
GROUP_TWO = "fghij"
_GROUP_ONE_WEIGHTS = [44, 24, 15, 10, 7]
_GROUP_TWO_WEIGHTS = [36, 30, 13, 9, 6]


def two_group_text(seed: int, length: int = 20000, stay_prob: float = 0.05) -> str:
    """Text over two disjoint 5-letter groups that almost always alternates
    groups, so nearly every digraph crosses them."""
    rng = random.Random(seed)
    groups = (
        (list(GROUP_ONE), _GROUP_ONE_WEIGHTS),
        (list(GROUP_TWO), _GROUP_TWO_WEIGHTS),
    )
    current = 0
    out = []
    for _ in range(length):
        letters, weights = groups[current]
        out.append(rng.choices(letters, weights=weights, k=1)[0])
        if rng.random() >= stay_prob:
            current = 1 - current
    return "".join(out)


def two_group_alphabet() -> AlphabetConfig:
    return AlphabetConfig(name="two-group", letters=tuple(GROUP_ONE + GROUP_TWO))


def random_db(
    seed: int,
    universe_size: int = 8,
    n_transactions: int = 30,
    max_items: int = 4,
) -> TransactionDB:
    """Random transaction database over single-letter items A, B, C, ..."""
    rng = random.Random(seed)
    universe = tuple(string.ascii_uppercase[:universe_size])
    rows = []
    for i in range(1, n_transactions + 1):
        size = rng.randint(1, min(max_items, universe_size))
        rows.append((f"T{i}", rng.sample(universe, size)))
    return TransactionDB.build(universe, rows)
