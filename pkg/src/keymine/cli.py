"""Command-line front end: stats, mine, design, evaluate, compare-only.

Every command validates its inputs up front, writes its outputs plus a
machine-readable run manifest (content hashes of inputs, parameters, tool
version) into the output directory, and exits 0 only if all requested
outputs were written and all embedded audits passed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .corpus import (
    AlphabetConfig,
    IngestionError,
    count_ngraphs,
    merge_tables,
    read_manifest,
    tokenize_file,
    write_ngraph_tsv,
)
from .evaluation import (
    IncomparableReportsError,
    compare,
    evaluate_streams,
    read_report_json,
    write_comparison_tsv,
    write_report_json,
    write_report_tsv,
)
from .layout import (
    GeometryCapacityError,
    GeometryFormatError,
    LayoutFormatError,
    TIE_POLICIES,
    assign_hands,
    audit_partition,
    default_geometry,
    load_geometry,
    load_layout,
    place_keys,
    save_geometry,
    save_layout,
    write_trace_tsv,
)
from .mining import (
    MiningParams,
    digraphs_as_transactions,
    generate_rules,
    mine_frequent,
    read_transactions_tsv,
    write_frequent_tsv,
    write_rules_tsv,
)


class CliError(Exception):
    """User-facing failure; message goes to stderr, exit code 1."""


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_run_manifest(out_dir: Path, command: str, parameters: dict, inputs: Sequence[Path]) -> None:
    manifest = {
        "tool": "keymine",
        "version": __version__,
        "command": command,
        "parameters": parameters,
        "inputs": {str(p): _sha256(p) for p in inputs},
    }
    (out_dir / "run_manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def _out_dir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require(args, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise CliError(f"--{name.replace('_', '-')} is required (flag or config file)")


def _load_corpus(args) -> tuple[AlphabetConfig, list[Path], list]:
    _require(args, "alphabet", "manifest")
    alphabet = AlphabetConfig.from_json(args.alphabet)
    files = read_manifest(args.manifest)
    if not files:
        raise CliError(f"{args.manifest}: manifest lists no corpus files")
    streams = [tokenize_file(p, alphabet) for p in files]
    return alphabet, files, streams


def _parse_support_threshold(raw) -> tuple[str, int | float]:
    """An integer is an absolute count (>= 1); a float in (0, 1] is a
    fraction of the database size, converted with ceiling once the size is
    known. Validated before any input is read."""
    if isinstance(raw, bool):
        raise CliError("--min-support must be a count or a fraction")
    if isinstance(raw, int):
        if raw < 1:
            raise CliError(f"--min-support count must be >= 1, got {raw}")
        return "count", raw
    if isinstance(raw, float):
        if not 0 < raw <= 1:
            raise CliError(f"--min-support fraction must be in (0, 1], got {raw}")
        return "fraction", raw
    text = str(raw).strip()
    try:
        return _parse_support_threshold(int(text))
    except ValueError:
        pass
    try:
        return _parse_support_threshold(float(text))
    except ValueError:
        raise CliError(f"--min-support must be a count or a fraction, got {text!r}") from None


def cmd_stats(args) -> int:
    alphabet, files, streams = _load_corpus(args)
    tables = {n: merge_tables([count_ngraphs(s, n) for s in streams]) for n in (1, 2, 3)}
    total_letters = tables[1].total
    if total_letters == 0:
        raise CliError("corpus contains no alphabet letters")
    out = _out_dir(args)
    names = {1: "monographs.tsv", 2: "digraphs.tsv", 3: "trigraphs.tsv"}
    for n, fname in names.items():
        write_ngraph_tsv(tables[n], out / fname)
    summary = {
        "total_letters": total_letters,
        "distinct_letters": len(tables[1].counts),
        "undetermined": sum(s.undetermined_count for s in streams),
        "sources": len(files),
    }
    if args.format == "json":
        (out / "summary.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    else:
        lines = [f"{k}\t{v}" for k, v in summary.items()]
        (out / "summary.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    _write_run_manifest(
        out,
        "stats",
        {"alphabet": str(args.alphabet), "manifest": str(args.manifest), "format": args.format},
        [Path(args.alphabet), Path(args.manifest), *files],
    )
    print(f"stats: {total_letters} letters, {summary['distinct_letters']} distinct, "
          f"{summary['undetermined']} undetermined -> {out}")
    return 0


def cmd_mine(args) -> int:
    _require(args, "min_support", "min_confidence")
    support_kind, support_value = _parse_support_threshold(args.min_support)
    min_confidence = float(args.min_confidence)
    if min_confidence < 0:
        raise CliError(f"--min-confidence must be >= 0, got {min_confidence}")
    inputs: list[Path]
    if args.transactions:
        db = read_transactions_tsv(args.transactions)
        inputs = [Path(args.transactions)]
        source = {"transactions": str(args.transactions)}
    else:
        alphabet, files, streams = _load_corpus(args)
        digraphs = merge_tables([count_ngraphs(s, 2) for s in streams])
        if digraphs.total == 0:
            raise CliError("corpus contains no digraphs to mine")
        db = digraphs_as_transactions(digraphs)
        inputs = [Path(args.alphabet), Path(args.manifest), *files]
        source = {"alphabet": str(args.alphabet), "manifest": str(args.manifest)}
    count = support_value if support_kind == "count" else math.ceil(support_value * len(db))
    params = MiningParams(min_support_count=count, min_confidence=min_confidence)
    if min_confidence > 1:
        print(f"warning: minimum confidence {min_confidence} exceeds 1; no rule can satisfy it")
    levels = mine_frequent(db, params)
    for level in levels:
        print(
            f"level {level.k}: {len(level.candidates_evaluated)} candidates, "
            f"{len(level.itemsets)} frequent (1 scan)"
        )
    print(f"scans performed: {len(levels)}" if levels else "scans performed: 1 (no frequent itemsets)")
    rules = generate_rules(levels, len(db), params)
    out = _out_dir(args)
    write_frequent_tsv(levels, len(db), out / "frequent_itemsets.tsv")
    write_rules_tsv(rules, out / "rules.tsv")
    _write_run_manifest(
        out,
        "mine",
        {
            **source,
            "min_support": str(args.min_support),
            "min_support_count": params.min_support_count,
            "min_confidence": min_confidence,
        },
        inputs,
    )
    print(f"mine: {sum(len(l.itemsets) for l in levels)} frequent itemsets, "
          f"{len(rules)} rules -> {out}")
    return 0


def cmd_design(args) -> int:
    alphabet, files, streams = _load_corpus(args)
    monographs = merge_tables([count_ngraphs(s, 1) for s in streams])
    if monographs.total == 0:
        raise CliError("corpus contains no alphabet letters")
    digraphs = merge_tables([count_ngraphs(s, 2) for s in streams])
    db = digraphs_as_transactions(digraphs)
    geometry = load_geometry(args.geometry) if args.geometry else default_geometry()
    partition = assign_hands(monographs, db, tie_policy=args.tie_policy)
    layout = place_keys(partition, monographs, geometry, name=args.name)
    audit = audit_partition(partition, monographs, db)
    out = _out_dir(args)
    if args.geometry:
        (out / "geometry.json").write_bytes(Path(args.geometry).read_bytes())
    else:
        save_geometry(geometry, out / "geometry.json")
    save_layout(layout, out / "layout.json", geometry_ref="geometry.json")
    write_trace_tsv(partition, out / "trace.tsv")
    inputs = [Path(args.alphabet), Path(args.manifest), *files]
    if args.geometry:
        inputs.append(Path(args.geometry))
    _write_run_manifest(
        out,
        "design",
        {
            "alphabet": str(args.alphabet),
            "manifest": str(args.manifest),
            "geometry": str(args.geometry) if args.geometry else "<default>",
            "tie_policy": args.tie_policy,
            "name": args.name,
        },
        inputs,
    )
    print(f"design: {len(partition.left)} letters left, {len(partition.right)} right -> {out}")
    print(f"audit: {'pass' if audit.ok else 'FAIL: ' + audit.message}")
    if not audit.ok:
        return 1
    return 0


def cmd_evaluate(args) -> int:
    alphabet, files, streams = _load_corpus(args)
    out = _out_dir(args)
    reports = []
    for i, layout_path in enumerate(args.layouts, start=1):
        layout = load_layout(layout_path)
        report = evaluate_streams(streams, layout)
        reports.append(report)
        stem = Path(layout_path).stem
        write_report_json(report, out / f"report_{i:02d}_{stem}.json")
        write_report_tsv(report, out / f"report_{i:02d}_{stem}.tsv")
        print(
            f"{report.layout_name}: switching {report.hand_switching}, "
            f"left {report.left_load}, right {report.right_load}, "
            f"undetermined {report.undetermined}"
        )
    table = compare(reports)
    write_comparison_tsv(table, out / "comparison.tsv")
    _write_run_manifest(
        out,
        "evaluate",
        {
            "alphabet": str(args.alphabet),
            "manifest": str(args.manifest),
            "layouts": [str(p) for p in args.layouts],
        },
        [Path(args.alphabet), Path(args.manifest), *files, *(Path(p) for p in args.layouts)],
    )
    print(f"evaluate: comparison of {len(reports)} layout(s) -> {out}")
    return 0


def cmd_compare_only(args) -> int:
    reports = [read_report_json(p) for p in args.reports]
    table = compare(reports)
    out = _out_dir(args)
    write_comparison_tsv(table, out / "comparison.tsv")
    _write_run_manifest(
        out,
        "compare-only",
        {"reports": [str(p) for p in args.reports]},
        [Path(p) for p in args.reports],
    )
    print(f"compare-only: {len(reports)} report(s) -> {out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file supplying defaults for any flag")
    common.add_argument("--output-dir", help="directory for outputs (default: .)")
    common.add_argument("--format", choices=("tsv", "json"), help="summary format (default: tsv)")
    common.add_argument("--seed", type=int, help="seed recorded in the run manifest")

    corpus = argparse.ArgumentParser(add_help=False)
    corpus.add_argument("--alphabet", help="alphabet JSON file")
    corpus.add_argument("--manifest", help="corpus manifest (one file path per line)")

    parser = argparse.ArgumentParser(
        prog="keymine",
        description="Corpus-driven keyboard layout design and evaluation",
    )
    parser.add_argument("--version", action="version", version=f"keymine {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("stats", parents=[common, corpus], help="write n-gram frequency tables")

    p_mine = sub.add_parser(
        "mine", parents=[common, corpus], help="mine frequent itemsets and strong rules"
    )
    p_mine.add_argument("--transactions", help="mine a transaction TSV instead of a corpus")
    p_mine.add_argument("--min-support", help="absolute count or fraction in (0, 1]")
    p_mine.add_argument("--min-confidence", type=float, help="minimum rule confidence")

    p_design = sub.add_parser(
        "design", parents=[common, corpus], help="design a layout from a corpus"
    )
    p_design.add_argument("--geometry", help="geometry JSON (default: built-in 30+30 keys)")
    p_design.add_argument(
        "--tie-policy",
        choices=TIE_POLICIES,
        help="where mixed-signal letters go (default: left-biased)",
    )
    p_design.add_argument("--name", help="layout name (default: designed)")

    p_eval = sub.add_parser(
        "evaluate", parents=[common, corpus], help="score layout files against a corpus"
    )
    p_eval.add_argument("layouts", nargs="+", help="layout JSON files")

    p_cmp = sub.add_parser(
        "compare-only", parents=[common], help="rank previously written report JSONs"
    )
    p_cmp.add_argument("reports", nargs="+", help="report JSON files")

    return parser


_CONFIG_KEYS = {
    "alphabet": "alphabet",
    "manifest": "manifest",
    "geometry": "geometry",
    "min_support": "min_support",
    "min_confidence": "min_confidence",
    "tie_policy": "tie_policy",
    "output_dir": "output_dir",
    "format": "format",
    "seed": "seed",
    "name": "name",
    "transactions": "transactions",
}

_DEFAULTS = {"output_dir": ".", "format": "tsv", "tie_policy": "left-biased", "name": "designed"}


def _apply_config(args: argparse.Namespace) -> None:
    """Fill unset flags from the config file, then from built-in defaults."""
    if args.config:
        path = Path(args.config)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"{path}: cannot read config: {exc}") from exc
        if not isinstance(data, dict):
            raise CliError(f"{path}: config must be a JSON object")
        unknown = set(data) - set(_CONFIG_KEYS)
        if unknown:
            raise CliError(f"{path}: unknown config keys: {', '.join(sorted(unknown))}")
        for key, attr in _CONFIG_KEYS.items():
            if key in data and getattr(args, attr, None) is None:
                setattr(args, attr, data[key])
    for attr, value in _DEFAULTS.items():
        if getattr(args, attr, None) is None and hasattr(args, attr):
            setattr(args, attr, value)


_COMMANDS = {
    "stats": cmd_stats,
    "mine": cmd_mine,
    "design": cmd_design,
    "evaluate": cmd_evaluate,
    "compare-only": cmd_compare_only,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return _COMMANDS[args.command](args)
    except (
        CliError,
        IngestionError,
        GeometryFormatError,
        LayoutFormatError,
        GeometryCapacityError,
        IncomparableReportsError,
        OSError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
