"""Corpus-driven keyboard layout design and evaluation toolkit.

Pipeline: tokenize a text corpus into alphabet letters, count letter
n-grams, view digraph occurrences as item transactions, mine frequent
itemsets and strong association rules, assign letters to hands for
maximum hand alternation, place them on keys by frequency, and score
arbitrary layouts against corpora.
"""

__version__ = "0.1.0"

from .corpus import (
    AlphabetConfig,
    IngestionError,
    LetterStream,
    NGraphTable,
    Token,
    count_ngraphs,
    monograph_ranking,
    tokenize,
)
from .evaluation import ComparisonTable, EvalReport, compare, evaluate
from .layout import (
    HandPartition,
    KeyboardGeometry,
    Layout,
    affinity,
    assign_hands,
    audit_partition,
    default_geometry,
    place_keys,
)
from .mining import (
    AssociationRule,
    CountedItemset,
    FrequentLevel,
    MiningParams,
    TransactionDB,
    brute_force_frequent,
    count_supports,
    digraphs_as_transactions,
    generate_candidates,
    generate_rules,
    mine_frequent,
)

__all__ = [
    "AlphabetConfig",
    "AssociationRule",
    "ComparisonTable",
    "CountedItemset",
    "EvalReport",
    "FrequentLevel",
    "HandPartition",
    "IngestionError",
    "KeyboardGeometry",
    "Layout",
    "LetterStream",
    "MiningParams",
    "NGraphTable",
    "Token",
    "TransactionDB",
    "affinity",
    "assign_hands",
    "audit_partition",
    "brute_force_frequent",
    "compare",
    "count_ngraphs",
    "count_supports",
    "default_geometry",
    "digraphs_as_transactions",
    "evaluate",
    "generate_candidates",
    "generate_rules",
    "mine_frequent",
    "monograph_ranking",
    "place_keys",
    "tokenize",
]
