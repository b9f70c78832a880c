"""Micro-batch processing over record streams with rule-driven event
detection, hot rule deployment, and timing instrumentation.

A "record" is the closed set of triples sharing one subject; batching is by
record so a rule body never straddles batches. Rule deploy/undeploy may be
called from other threads and takes effect at the next batch boundary.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .graph import Graph
from .rules import DEFAULT_NS, Rule, evaluate_body
from .terms import Iri, Term, Triple


@dataclass(frozen=True)
class BatchConfig:
    batch_size: int
    delay_ms: float = 0.0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.delay_ms < 0:
            raise ValueError("delay_ms must be >= 0")


@dataclass(frozen=True)
class Event:
    rule: str
    subject: Iri
    bindings: tuple[tuple[str, Term], ...]
    batch_no: int
    detected_at: float

    def to_json(self) -> str:
        def plain(t: Term):
            return t.value if isinstance(t, Iri) else t.value

        return json.dumps(
            {
                "rule": self.rule,
                "subject": self.subject.value,
                "bindings": {k: plain(v) for k, v in self.bindings},
                "batch_no": self.batch_no,
                "detected_at": self.detected_at,
            }
        )


@dataclass(frozen=True)
class BatchStats:
    batch_no: int
    size: int
    rules_parsed: int
    elapsed_ms: float


@dataclass
class StreamSummary:
    batches: list[BatchStats] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    complete: bool = True
    error: Optional[str] = None


Record = Sequence[Triple]  # all triples of one subject


def records_from_graph(g: Graph) -> list[list[Triple]]:
    """Group a graph into per-subject records, subjects in first-insertion
    order, triples per record in canonical order."""
    return [g.match(s) for s in g.subjects()]


class StreamEngine:
    def __init__(self, rules: Iterable[Rule] = (), ns: str = DEFAULT_NS):
        self._lock = threading.Lock()
        self._rules: dict[str, Rule] = {}
        self._ns = ns
        for r in rules:
            self._rules[r.name] = r

    def deploy_rule(self, rule: Rule) -> float:
        """Activate a rule for subsequent batches; returns deployment wall
        time in milliseconds."""
        if not isinstance(rule, Rule):
            raise TypeError("deploy_rule expects a parsed Rule")
        started = time.perf_counter()
        with self._lock:
            self._rules[rule.name] = rule
        return (time.perf_counter() - started) * 1000.0

    def undeploy_rule(self, name: str) -> bool:
        with self._lock:
            return self._rules.pop(name, None) is not None

    def active_rules(self) -> list[Rule]:
        with self._lock:
            return list(self._rules.values())

    def run_stream(
        self,
        source: Iterable[Record],
        config: BatchConfig,
        sink: Optional[Callable[[Event], None]] = None,
        on_batch: Optional[Callable[[BatchStats], None]] = None,
    ) -> StreamSummary:
        """Group records into batches, evaluate the active rules against each
        batch, emit events, and sleep `delay_ms` between batches. Elapsed
        times exclude the configured delay. A trailing partial batch is
        processed last."""
        summary = StreamSummary()
        batch: list[Record] = []
        batch_no = 0
        first = True

        def flush(records: list[Record]) -> bool:
            nonlocal batch_no, first
            if not first and config.delay_ms:
                time.sleep(config.delay_ms / 1000.0)
            first = False
            batch_no += 1
            g = Graph()
            for record in records:
                g.insert_all(record)
            rules = self.active_rules()
            # elapsed covers event detection (rule evaluation + emission),
            # not graph assembly or the configured inter-batch delay
            started = time.perf_counter()
            fired_rules = 0
            new_events = []
            for rule in rules:
                seen_subjects = set()
                for bindings in evaluate_body(g, rule.body, ns=self._ns):
                    subject = _primary_subject(rule, bindings)
                    if subject in seen_subjects:
                        continue
                    seen_subjects.add(subject)
                    new_events.append(
                        Event(
                            rule=rule.name,
                            subject=subject,
                            bindings=tuple(sorted(bindings.items())),
                            batch_no=batch_no,
                            detected_at=time.monotonic(),
                        )
                    )
                if seen_subjects:
                    fired_rules += 1
            elapsed_ms = (time.perf_counter() - started) * 1000.0
            stats = BatchStats(batch_no, len(records), fired_rules, elapsed_ms)
            summary.batches.append(stats)
            summary.events.extend(new_events)
            if sink is not None:
                try:
                    for event in new_events:
                        sink(event)
                except Exception as exc:  # sink failure aborts the stream
                    summary.complete = False
                    summary.error = f"sink failure: {exc}"
                    return False
            if on_batch is not None:
                on_batch(stats)
            return True

        for record in source:
            batch.append(list(record))
            if len(batch) == config.batch_size:
                if not flush(batch):
                    return summary
                batch = []
        if batch:
            if not flush(batch):
                return summary
        return summary


def _primary_subject(rule: Rule, bindings: dict[str, Term]) -> Iri:
    from .rules import BuiltinAtom, ClassAtom

    for atom in rule.body:
        if isinstance(atom, BuiltinAtom):
            continue
        var = atom.var if isinstance(atom, ClassAtom) else atom.subject
        value = bindings.get(var.name)
        if isinstance(value, Iri):
            return value
    # fall back to any IRI binding (rule bodies always bind at least one)
    for value in bindings.values():
        if isinstance(value, Iri):
            return value
    raise ValueError(f"rule {rule.name} produced no subject binding")


def run_stream(
    source: Iterable[Record],
    config: BatchConfig,
    rules: Iterable[Rule],
    sink: Optional[Callable[[Event], None]] = None,
    ns: str = DEFAULT_NS,
) -> StreamSummary:
    return StreamEngine(rules, ns).run_stream(source, config, sink=sink)


def events_to_jsonl(events: Iterable[Event]) -> str:
    return "".join(e.to_json() + "\n" for e in events)


# ---------------------------------------------------------------------------
# timing sweeps

BATCH_SIZE_SWEEP = (20, 40, 60, 80, 100)
RULE_COUNT_SWEEP = (4, 6, 8, 10, 12)


@dataclass(frozen=True)
class TimingRow:
    label: str
    batch_size: int
    rule_count: int
    run_means_ms: tuple[float, ...]

    @property
    def mean_ms(self) -> float:
        return sum(self.run_means_ms) / len(self.run_means_ms)


def _mean_batch_ms(summary: StreamSummary) -> float:
    if not summary.batches:
        return 0.0
    return sum(b.elapsed_ms for b in summary.batches) / len(summary.batches)


def _run_sweep(
    records: Sequence[Record],
    configs: Sequence[tuple[str, int, int, Sequence[Rule]]],
    runs: int,
    ns: str,
    inner: int = 5,
) -> list[TimingRow]:
    """Shared sweep driver. Runs are interleaved across configurations so
    machine drift (GC, frequency scaling) biases every configuration alike;
    one unmeasured warm-up pass precedes measurement; each run value is the
    mean per-batch event-detection time over `inner` streams."""

    def measure(batch_size: int, rules: Sequence[Rule]) -> float:
        config = BatchConfig(batch_size=batch_size, delay_ms=0)
        engine = StreamEngine(rules, ns)
        means = [_mean_batch_ms(engine.run_stream(records, config)) for _ in range(inner)]
        return sum(means) / len(means)

    for _, batch_size, _, rules in configs:  # warm-up, discarded
        measure(batch_size, rules)
    values: list[list[float]] = [[] for _ in configs]
    for _ in range(runs):
        for i, (_, batch_size, _, rules) in enumerate(configs):
            values[i].append(measure(batch_size, rules))
    return [
        TimingRow(label, batch_size, rule_count, tuple(values[i]))
        for i, (label, batch_size, rule_count, _) in enumerate(configs)
    ]


def bench_batch_sizes(
    records: Sequence[Record],
    rules: Sequence[Rule],
    sizes: Sequence[int] = BATCH_SIZE_SWEEP,
    runs: int = 5,
    ns: str = DEFAULT_NS,
) -> list[TimingRow]:
    """Sweep batch sizes at a fixed rule set; per run the value is the mean
    per-batch evaluation time (delays excluded by construction)."""
    configs = [
        (f"Batch Size {size} ({len(rules)} Rules)", size, len(rules), list(rules))
        for size in sizes
    ]
    return _run_sweep(records, configs, runs, ns)


def bench_rule_counts(
    records: Sequence[Record],
    rules: Sequence[Rule],
    counts: Sequence[int] = RULE_COUNT_SWEEP,
    batch_size: int = 50,
    runs: int = 5,
    ns: str = DEFAULT_NS,
) -> list[TimingRow]:
    """Sweep the number of active rules at a fixed batch size."""
    if max(counts) > len(rules):
        raise ValueError(f"need at least {max(counts)} rules, got {len(rules)}")
    configs = [
        (f"Batch Size {batch_size} ({count} Rules)", batch_size, count, list(rules[:count]))
        for count in counts
    ]
    return _run_sweep(records, configs, runs, ns)


def timing_csv(rows: Sequence[TimingRow]) -> str:
    """Runs as rows, sweep configurations as columns, trailing mean line."""
    if not rows:
        return "Run\n"
    runs = len(rows[0].run_means_ms)
    lines = ["Run," + ",".join(r.label for r in rows)]
    for i in range(runs):
        lines.append(f"{i + 1}," + ",".join(f"{r.run_means_ms[i]:.3f}" for r in rows))
    lines.append("Mean," + ",".join(f"{r.mean_ms:.3f}" for r in rows))
    return "\n".join(lines) + "\n"
