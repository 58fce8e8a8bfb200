"""Corpus ingestion: tokenization and letter n-gram statistics.

Raw text is NFC-normalized, stripped of whitespace, and classified code
point by code point against an alphabet. Letters feed monograph, digraph
and trigraph frequency tables; anything else is kept as an "undetermined"
token that breaks n-gram adjacency (typing a digit or an unknown glyph
interrupts the letter-to-letter flow, so no window may span it).
"""

from __future__ import annotations

import json
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple


class IngestionError(ValueError):
    """Corpus bytes or config files that cannot be decoded or parsed."""


@dataclass(frozen=True)
class AlphabetConfig:
    """Ordered set of Unicode code points considered typeable letters.

    The order is the canonical letter order used for deterministic
    tie-breaking throughout the pipeline.
    """

    name: str
    letters: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.letters:
            raise ValueError("alphabet must contain at least one letter")
        seen: dict[str, int] = {}
        for i, ch in enumerate(self.letters):
            if len(ch) != 1:
                raise ValueError(f"alphabet entry {ch!r} is not a single code point")
            if len(unicodedata.normalize("NFC", ch)) != 1:
                # Composition exclusions (e.g. U+09DC) decompose under NFC
                # and would never match normalized text; require the parts.
                raise ValueError(
                    f"alphabet entry {ch!r} (U+{ord(ch):04X}) decomposes under "
                    "composed-form normalization; list its constituent code points instead"
                )
            if ch.isspace():
                raise ValueError(f"alphabet must not contain whitespace (U+{ord(ch):04X})")
            if ch in seen:
                raise ValueError(f"duplicate alphabet letter {ch!r}")
            seen[ch] = i
        object.__setattr__(self, "_index", seen)

    def __contains__(self, ch: str) -> bool:
        return ch in self._index

    def __len__(self) -> int:
        return len(self.letters)

    def index_of(self, ch: str) -> int:
        """Position of a letter in the canonical order."""
        return self._index[ch]

    @classmethod
    def from_json(cls, path: str | Path) -> "AlphabetConfig":
        """Load an alphabet file: {"name": str, "letters": [str, ...]}."""
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except UnicodeDecodeError as exc:
            raise IngestionError(f"{path}: not valid UTF-8 at byte offset {exc.start}") from exc
        except json.JSONDecodeError as exc:
            raise IngestionError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(data, dict) or "name" not in data or "letters" not in data:
            raise IngestionError(f"{path}: expected an object with 'name' and 'letters'")
        letters = data["letters"]
        if not isinstance(letters, list) or not all(isinstance(x, str) for x in letters):
            raise IngestionError(f"{path}: 'letters' must be a list of single-code-point strings")
        try:
            return cls(name=str(data["name"]), letters=tuple(letters))
        except ValueError as exc:
            raise IngestionError(f"{path}: {exc}") from exc


class Token(NamedTuple):
    """One non-whitespace code point; known=True iff it is an alphabet letter."""

    char: str
    known: bool


@dataclass
class LetterStream:
    """Tokenized view of one text source. Never contains whitespace tokens."""

    tokens: list[Token]
    alphabet: AlphabetConfig
    source_id: str = "<memory>"

    @property
    def letter_count(self) -> int:
        return sum(1 for t in self.tokens if t.known)

    @property
    def undetermined_count(self) -> int:
        return sum(1 for t in self.tokens if not t.known)


def tokenize(text: str, alphabet: AlphabetConfig, source_id: str = "<memory>") -> LetterStream:
    """Normalize to composed form (NFC), drop whitespace, classify the rest.

    Every remaining code point is emitted in order: a letter token when it
    is in the alphabet, an undetermined token otherwise (digits, punctuation,
    foreign scripts). Output length equals the normalized input length minus
    its whitespace count.
    """
    text = unicodedata.normalize("NFC", text)
    tokens = [Token(ch, ch in alphabet) for ch in text if not ch.isspace()]
    return LetterStream(tokens=tokens, alphabet=alphabet, source_id=source_id)


@dataclass
class NGraphTable:
    """Frequency counts of letter n-grams (n = 1, 2 or 3) over a corpus."""

    n: int
    counts: Counter[tuple[str, ...]]
    alphabet: AlphabetConfig

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def merge(self, other: "NGraphTable") -> "NGraphTable":
        """Combine counts from another table of the same order and alphabet."""
        if other.n != self.n:
            raise ValueError(f"cannot merge order-{other.n} table into order-{self.n} table")
        if other.alphabet != self.alphabet:
            raise ValueError("cannot merge tables over different alphabets")
        return NGraphTable(n=self.n, counts=self.counts + other.counts, alphabet=self.alphabet)

    def sorted_items(self) -> list[tuple[tuple[str, ...], int]]:
        """Entries in descending count order, ties by alphabet order."""
        idx = self.alphabet.index_of
        return sorted(
            self.counts.items(),
            key=lambda kv: (-kv[1], tuple(idx(ch) for ch in kv[0])),
        )


def count_ngraphs(stream: LetterStream, n: int) -> NGraphTable:
    """Count runs of n consecutive letters; windows never span undetermined tokens."""
    if n not in (1, 2, 3):
        raise ValueError(f"n must be 1, 2 or 3, got {n}")
    counts: Counter[tuple[str, ...]] = Counter()
    run: list[str] = []
    for tok in stream.tokens:
        if tok.known:
            run.append(tok.char)
        else:
            _count_run(run, n, counts)
            run = []
    _count_run(run, n, counts)
    return NGraphTable(n=n, counts=counts, alphabet=stream.alphabet)


def _count_run(run: list[str], n: int, counts: Counter[tuple[str, ...]]) -> None:
    for i in range(len(run) - n + 1):
        counts[tuple(run[i : i + n])] += 1


class RankedLetter(NamedTuple):
    letter: str
    count: int
    percentage: float


def monograph_ranking(table: NGraphTable) -> list[RankedLetter]:
    """Letters by descending frequency; ties broken by alphabet order.

    Percentage is 100 * count / total over all counted letters.
    """
    if table.n != 1:
        raise ValueError(f"ranking requires a monograph table, got n={table.n}")
    total = table.total
    if total == 0:
        return []
    return [
        RankedLetter(key[0], count, 100.0 * count / total)
        for key, count in table.sorted_items()
    ]


def read_text(path: str | Path) -> str:
    """Read a UTF-8 corpus file; decoding failures name the byte offset."""
    path = Path(path)
    raw = path.read_bytes()
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise IngestionError(f"{path}: not valid UTF-8 at byte offset {exc.start}") from exc


def tokenize_file(path: str | Path, alphabet: AlphabetConfig) -> LetterStream:
    path = Path(path)
    return tokenize(read_text(path), alphabet, source_id=str(path))


def read_manifest(path: str | Path) -> list[Path]:
    """Read a corpus manifest: one file path per line, '#' comments allowed.

    Relative paths are resolved against the manifest's directory. Sources
    listed here are tokenized independently; n-grams never cross files.
    """
    path = Path(path)
    base = path.parent
    paths: list[Path] = []
    for line in read_text(path).splitlines():
        entry = line.split("#", 1)[0].strip()
        if not entry:
            continue
        p = Path(entry)
        paths.append(p if p.is_absolute() else base / p)
    return paths


def merge_tables(tables: Iterable[NGraphTable]) -> NGraphTable:
    tables = list(tables)
    if not tables:
        raise ValueError("no tables to merge")
    merged = tables[0]
    for t in tables[1:]:
        merged = merged.merge(t)
    return merged


def write_ngraph_tsv(table: NGraphTable, path: str | Path) -> None:
    """Write a table as TSV: n-gram (code points joined by '+'), count, percentage."""
    total = table.total
    lines = ["ngram\tcount\tpercentage"]
    for key, count in table.sorted_items():
        pct = 100.0 * count / total if total else 0.0
        lines.append(f"{'+'.join(key)}\t{count}\t{pct:.6f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
