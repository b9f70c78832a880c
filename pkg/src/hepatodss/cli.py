"""Command-line entry points mirroring the HTTP service for scripted use.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import assets, dtree, stream as stream_mod
from .errors import DataError
from .graph import Graph
from .ingest import SCHEMA_NS, ingest_csv
from .ntriples import parse_ntriples, serialize_ntriples
from .ontology import compute_metrics, load_schema
from .rules import DEFAULT_NS, infer, parse_rules, serialize_rules
from .sparql import evaluate as sparql_evaluate, parse_query, rows_to_json, rows_to_tsv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hepatodss", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a lab CSV into canonical N-Triples")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ns", default="http://example.org/")

    p = sub.add_parser("train", help="train and cross-validate the decision tree")
    p.add_argument("--csv", required=True)
    p.add_argument("--criterion", choices=["gini", "entropy"], default="gini")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--report", required=True)

    p = sub.add_parser("extract-rules", help="fit a tree and export its paths as rules")
    p.add_argument("--csv", required=True)
    p.add_argument("--criterion", choices=["gini", "entropy"], default="gini")
    p.add_argument("--out", required=True)

    p = sub.add_parser("infer", help="forward-chain rules over a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--proofs")
    p.add_argument("--ns", default=DEFAULT_NS)

    p = sub.add_parser("query", help="evaluate a query file against a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--format", choices=["tsv", "json"], default="tsv")
    p.add_argument("--out")

    p = sub.add_parser("stream", help="batch-process a graph with event rules")
    p.add_argument("--graph", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--batch-size", type=int, required=True)
    p.add_argument("--delay-ms", type=float, default=0.0)
    p.add_argument("--events", required=True)
    p.add_argument("--stats", required=True)
    p.add_argument("--ns", default=SCHEMA_NS)

    p = sub.add_parser("metrics", help="structural ontology metrics for a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--schema")
    p.add_argument("--out")

    p = sub.add_parser("bench", help="timing sweeps over batch sizes or rule counts")
    p.add_argument("--graph", required=True)
    p.add_argument("--sweep", choices=["batch", "rules"], required=True)
    p.add_argument("--rules")
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--custom", help="comma-separated sweep values overriding the default grid")
    p.add_argument("--out", required=True)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--bind", default=os.environ.get("BIND_ADDR", "127.0.0.1:8000"))
    p.add_argument("--data", default=os.environ.get("DATA_DIR"))

    return parser


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: Optional[str], text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_graph(path: str) -> Graph:
    return parse_ntriples(_read(path))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return _dispatch(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "ingest":
        graph, _ = ingest_csv(_read(args.csv), ns=args.ns)
        _write(args.out, serialize_ntriples(graph))
        return 0

    if args.command == "train":
        _, records = ingest_csv(_read(args.csv))
        config = dtree.TrainConfig(criterion=args.criterion, random_seed=args.seed)
        metrics = dtree.cross_validate_records(records, config, k=args.folds)
        _write(args.report, json.dumps(metrics.to_report(args.criterion, args.folds), indent=2) + "\n")
        return 0

    if args.command == "extract-rules":
        _, records = ingest_csv(_read(args.csv))
        tree = dtree.fit_records(records, dtree.TrainConfig(criterion=args.criterion))
        paths = dtree.extract_paths(tree)
        rules = dtree.paths_to_rules(paths, dtree.FEATURE_PROPERTY_MAP, dtree.CLASS_HEAD_MAP)
        _write(args.out, serialize_rules(rules))
        return 0

    if args.command == "infer":
        graph = _load_graph(args.graph)
        rules = parse_rules(_read(args.rules))
        result = infer(graph, rules, ns=args.ns)
        _write(args.out, serialize_ntriples(result.derived))
        if args.proofs:
            from .ntriples import serialize_triple

            proofs = [
                {
                    "rule": step.rule,
                    "derived": serialize_triple(step.derived),
                    "bindings": {
                        k: (v.value if hasattr(v, "value") else str(v)) for k, v in step.bindings
                    },
                }
                for step in result.proofs
            ]
            _write(args.proofs, json.dumps(proofs, indent=2) + "\n")
        return 0

    if args.command == "query":
        graph = _load_graph(args.graph)
        query = parse_query(_read(args.query))
        rows = sparql_evaluate(query, graph)
        if args.format == "tsv":
            _write(args.out, rows_to_tsv(query, rows))
        else:
            _write(args.out, rows_to_json(query, rows) + "\n")
        return 0

    if args.command == "stream":
        graph = _load_graph(args.graph)
        rules = parse_rules(_read(args.rules))
        config = stream_mod.BatchConfig(batch_size=args.batch_size, delay_ms=args.delay_ms)
        summary = stream_mod.run_stream(
            stream_mod.records_from_graph(graph), config, rules, ns=args.ns
        )
        _write(args.events, stream_mod.events_to_jsonl(summary.events))
        stats_lines = ["batch_no,size,rules_parsed,elapsed_ms"]
        stats_lines += [
            f"{b.batch_no},{b.size},{b.rules_parsed},{b.elapsed_ms:.3f}" for b in summary.batches
        ]
        _write(args.stats, "\n".join(stats_lines) + "\n")
        return 0 if summary.complete else 2

    if args.command == "metrics":
        graph = _load_graph(args.graph)
        schema = load_schema(_read(args.schema)) if args.schema else assets.liver_schema()
        metrics = compute_metrics(schema, graph)
        _write(args.out, json.dumps(metrics.to_dict(), indent=2) + "\n")
        return 0

    if args.command == "bench":
        graph = _load_graph(args.graph)
        records = stream_mod.records_from_graph(graph)
        rules = parse_rules(_read(args.rules)) if args.rules else assets.bench_rules()
        custom = None
        if args.custom:
            custom = tuple(int(v) for v in args.custom.split(","))
        if args.sweep == "batch":
            rows = stream_mod.bench_batch_sizes(
                records,
                rules[:5],
                sizes=custom or stream_mod.BATCH_SIZE_SWEEP,
                runs=args.runs,
                ns=SCHEMA_NS,
            )
        else:
            rows = stream_mod.bench_rule_counts(
                records,
                rules,
                counts=custom or stream_mod.RULE_COUNT_SWEEP,
                runs=args.runs,
                ns=SCHEMA_NS,
            )
        _write(args.out, stream_mod.timing_csv(rows))
        return 0

    if args.command == "serve":
        from .service import serve

        serve(bind=args.bind, data_dir=Path(args.data) if args.data else None)
        return 0

    raise AssertionError(f"unhandled command {args.command!r}")


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
