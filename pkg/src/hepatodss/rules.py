"""Horn-style rule language and forward-chaining reasoner.

A rule is `body -> head` where atoms are joined with `^`:

    Patient(?x) ^ hasValueAST(?x, ?ast) ^ swrlb:lessThanOrEqualTo(?ast, "53.05"^^xsd:float)
        -> isHepatitisCpatient(?x, true)

Unary atoms are class membership tests (rdf:type). Binary atoms assert or
match property triples; their object may be a variable, a typed literal, a
bare number, true/false, an explicit <IRI>, or a bareword symbolic constant
that resolves to an IRI in the rule namespace. `swrlb:` atoms are numeric
comparison builtins and may not appear in heads.

Inference is semi-naive forward chaining to fixpoint, recording one proof
step per derived triple instantiation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .errors import LiteralError, RuleEvalError, RuleParseError
from .graph import Graph
from .terms import (
    RDF_TYPE,
    XSD,
    XSD_BOOLEAN,
    XSD_FLOAT,
    XSD_INTEGER,
    Iri,
    Literal,
    Term,
    Triple,
    term_sort_key,
)

DEFAULT_NS = "http://example.org/liver#"

BUILTIN_OPS = {
    "lessThan": lambda a, b: a < b,
    "lessThanOrEqualTo": lambda a, b: a <= b,
    "greaterThan": lambda a, b: a > b,
    "greaterThanOrEqualTo": lambda a, b: a >= b,
    "equal": lambda a, b: a == b,
}


@dataclass(frozen=True)
class Var:
    name: str  # without the leading '?'

    def __repr__(self):
        return f"?{self.name}"


@dataclass(frozen=True)
class SymConst:
    """Bareword constant; resolves to an IRI in the rule namespace."""

    name: str


@dataclass(frozen=True)
class ClassAtom:
    cls: str
    var: Var


@dataclass(frozen=True)
class PropertyAtom:
    prop: str
    subject: Var
    value: Union[Var, Literal, SymConst, Iri]


@dataclass(frozen=True)
class BuiltinAtom:
    op: str
    left: Union[Var, Literal]
    right: Union[Var, Literal]


Atom = Union[ClassAtom, PropertyAtom, BuiltinAtom]


@dataclass(frozen=True)
class Rule:
    name: str
    body: tuple[Atom, ...]
    head: tuple[Atom, ...]


@dataclass(frozen=True)
class ProofStep:
    derived: Triple
    rule: str
    bindings: tuple[tuple[str, Term], ...]  # sorted (var name, bound term) pairs

    def binding_map(self) -> dict[str, Term]:
        return dict(self.bindings)


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<amp>\^\^|\^)
  | (?P<punct>[(),:])
  | (?P<iri><[^<>\s]*>)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise RuleParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    return tokens


class _RuleParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, offset: int = 0) -> Optional[_Token]:
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise RuleParseError("unexpected end of rule", len(self.text))
        self.i += 1
        return tok

    def expect(self, kind: str, text: Optional[str] = None) -> _Token:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            raise RuleParseError(f"expected {text or kind}, got {tok.text!r}", tok.pos)
        return tok

    def parse(self, default_name: str = "") -> Rule:
        name = default_name
        # optional "name:" prefix; swrlb:/xsd: are reserved atom prefixes
        first, second = self.peek(), self.peek(1)
        if (
            first is not None
            and second is not None
            and first.kind == "ident"
            and first.text not in ("swrlb", "xsd")
            and second.kind == "punct"
            and second.text == ":"
        ):
            name = first.text
            self.i += 2
        body = self._parse_atoms()
        self.expect("arrow")
        head = self._parse_atoms()
        if self.peek() is not None:
            raise RuleParseError(f"trailing content {self.peek().text!r}", self.peek().pos)
        rule = Rule(name, tuple(body), tuple(head))
        _validate(rule)
        return rule

    def _parse_atoms(self) -> list[Atom]:
        atoms = [self._parse_atom()]
        while self.peek() is not None and self.peek().kind == "amp" and self.peek().text == "^":
            self.next()
            atoms.append(self._parse_atom())
        return atoms

    def _parse_atom(self) -> Atom:
        tok = self.expect("ident")
        prefixed = False
        if self.peek() and self.peek().kind == "punct" and self.peek().text == ":":
            if tok.text != "swrlb":
                raise RuleParseError(f"unknown atom prefix {tok.text!r}", tok.pos)
            self.next()
            tok = self.expect("ident")
            prefixed = True
        name = tok.text
        self.expect("punct", "(")
        args = [self._parse_term()]
        while self.peek() and self.peek().kind == "punct" and self.peek().text == ",":
            self.next()
            args.append(self._parse_term())
        self.expect("punct", ")")

        if prefixed:
            if name not in BUILTIN_OPS:
                raise RuleParseError(f"unknown builtin swrlb:{name}", tok.pos)
            if len(args) != 2:
                raise RuleParseError(f"swrlb:{name} takes exactly 2 arguments", tok.pos)
            for a in args:
                if not isinstance(a, (Var, Literal)):
                    raise RuleParseError(f"swrlb:{name} arguments must be variables or literals", tok.pos)
            return BuiltinAtom(name, args[0], args[1])
        if len(args) == 1:
            if not isinstance(args[0], Var):
                raise RuleParseError(f"class atom {name} requires a variable argument", tok.pos)
            return ClassAtom(name, args[0])
        if len(args) == 2:
            if not isinstance(args[0], Var):
                raise RuleParseError(f"property atom {name} requires a variable subject", tok.pos)
            return PropertyAtom(name, args[0], args[1])
        raise RuleParseError(f"atom {name} has too many arguments", tok.pos)

    def _parse_term(self) -> Union[Var, Literal, SymConst, Iri]:
        tok = self.next()
        if tok.kind == "var":
            return Var(tok.text[1:])
        if tok.kind == "number":
            if re.fullmatch(r"[+-]?\d+", tok.text):
                return Literal(tok.text, XSD_INTEGER)
            return Literal(tok.text, XSD_FLOAT)
        if tok.kind == "iri":
            return Iri(tok.text[1:-1])
        if tok.kind == "string":
            lexical = _unquote(tok.text, tok.pos)
            if self.peek() and self.peek().kind == "amp" and self.peek().text == "^^":
                self.next()
                self.expect("ident", "xsd")
                self.expect("punct", ":")
                dt = self.expect("ident")
                try:
                    return Literal(lexical, XSD + dt.text)
                except LiteralError as exc:
                    raise RuleParseError(str(exc), tok.pos)
            return Literal(lexical)
        if tok.kind == "ident":
            if tok.text == "true":
                return Literal("true", XSD_BOOLEAN)
            if tok.text == "false":
                return Literal("false", XSD_BOOLEAN)
            return SymConst(tok.text)
        raise RuleParseError(f"unexpected token {tok.text!r} in atom arguments", tok.pos)


def _unquote(quoted: str, pos: int) -> str:
    body = quoted[1:-1]
    out, i = [], 0
    while i < len(body):
        c = body[i]
        if c == "\\":
            i += 1
            if i >= len(body):
                raise RuleParseError("dangling escape in string", pos)
            e = body[i]
            mapping = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}
            if e not in mapping:
                raise RuleParseError(f"bad escape \\{e} in string", pos)
            out.append(mapping[e])
        else:
            out.append(c)
        i += 1
    return "".join(out)


def _validate(rule: Rule):
    if not rule.body:
        raise RuleParseError("rule body must be non-empty")
    if not rule.head:
        raise RuleParseError("rule head must be non-empty")
    bound: set[str] = set()
    for atom in rule.body:
        if isinstance(atom, ClassAtom):
            bound.add(atom.var.name)
        elif isinstance(atom, PropertyAtom):
            bound.add(atom.subject.name)
            if isinstance(atom.value, Var):
                bound.add(atom.value.name)
    for atom in rule.body:
        if isinstance(atom, BuiltinAtom):
            for arg in (atom.left, atom.right):
                if isinstance(arg, Var) and arg.name not in bound:
                    raise RuleParseError(
                        f"builtin variable ?{arg.name} is not bound by any body atom"
                    )
    for atom in rule.head:
        if isinstance(atom, BuiltinAtom):
            raise RuleParseError("builtins are not allowed in rule heads")
        head_vars = []
        if isinstance(atom, ClassAtom):
            head_vars = [atom.var]
        elif isinstance(atom, PropertyAtom):
            head_vars = [atom.subject] + ([atom.value] if isinstance(atom.value, Var) else [])
        for v in head_vars:
            if v.name not in bound:
                raise RuleParseError(f"unsafe head variable ?{v.name}")


def parse_rule(text: str, default_name: str = "") -> Rule:
    return _RuleParser(text).parse(default_name)


def parse_rules(text: str) -> list[Rule]:
    """Rule file: one rule per line, `#` comments, optional `name:` prefix.
    Unnamed rules get r<index> names (1-based over the file)."""
    rules = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        rules.append(parse_rule(stripped, default_name=f"r{len(rules) + 1}"))
    return rules


# ---------------------------------------------------------------------------
# serialization

def _serialize_term(term) -> str:
    if isinstance(term, Var):
        return f"?{term.name}"
    if isinstance(term, SymConst):
        return term.name
    if isinstance(term, Iri):
        return f"<{term.value}>"
    if isinstance(term, Literal):
        if term.datatype == XSD_INTEGER:
            return term.canonical_lexical
        if term.datatype == XSD_BOOLEAN:
            return term.canonical_lexical
        if term.datatype.startswith(XSD) and term.datatype != XSD + "string":
            short = term.datatype[len(XSD):]
            return f'"{term.canonical_lexical}"^^xsd:{short}'
        return f'"{term.lexical}"'
    raise TypeError(f"cannot serialize {term!r}")


def serialize_atom(atom: Atom) -> str:
    if isinstance(atom, ClassAtom):
        return f"{atom.cls}(?{atom.var.name})"
    if isinstance(atom, PropertyAtom):
        return f"{atom.prop}(?{atom.subject.name}, {_serialize_term(atom.value)})"
    return f"swrlb:{atom.op}({_serialize_term(atom.left)}, {_serialize_term(atom.right)})"


def serialize_rule(rule: Rule) -> str:
    text = " ^ ".join(serialize_atom(a) for a in rule.body)
    text += " -> " + " ^ ".join(serialize_atom(a) for a in rule.head)
    if rule.name:
        return f"{rule.name}: {text}"
    return text


def serialize_rules(rules: Iterable[Rule]) -> str:
    return "".join(serialize_rule(r) + "\n" for r in rules)


# ---------------------------------------------------------------------------
# evaluation

def _resolve_value(value, ns: str) -> Term:
    if isinstance(value, SymConst):
        return Iri(ns + value.name)
    return value


def _numeric(term: Term, atom: Atom):
    if isinstance(term, Literal) and term.is_numeric:
        return term.value
    raise RuleEvalError(f"non-numeric value {term!r} in {serialize_atom(atom)}")


def _match_property(graph: Graph, pred: Iri, subject: Optional[Iri], value, ns: str):
    """Triples for a property atom; numeric constants match by value across
    numeric datatypes."""
    if isinstance(value, Var) or value is None:
        yield from graph.match_iter(subject, pred, None)
        return
    obj = _resolve_value(value, ns)
    if isinstance(obj, Literal) and obj.is_numeric:
        wanted = obj.value
        for t in graph.match_iter(subject, pred, None):
            o = t.object
            if isinstance(o, Literal) and o.is_numeric and o.value == wanted:
                yield t
    else:
        yield from graph.match_iter(subject, pred, obj)


def evaluate_body(
    graph: Graph,
    body: Sequence[Atom],
    bindings: Optional[dict[str, Term]] = None,
    ns: str = DEFAULT_NS,
    _delta: Optional[Graph] = None,
    _delta_at: Optional[int] = None,
) -> list[dict[str, Term]]:
    """All complete variable assignments under which every body atom holds.

    Builtins are deferred until both arguments are bound. When `_delta` and
    `_delta_at` are given, the atom at that index matches only delta triples
    (semi-naive restriction).
    """
    solutions = [dict(bindings) if bindings else {}]
    pending: list[tuple[int, BuiltinAtom]] = []

    def run_builtins(sol: dict[str, Term], todo) -> bool:
        for _, b in todo:
            left = sol[b.left.name] if isinstance(b.left, Var) else b.left
            right = sol[b.right.name] if isinstance(b.right, Var) else b.right
            if not BUILTIN_OPS[b.op](_numeric(left, b), _numeric(right, b)):
                return False
        return True

    for idx, atom in enumerate(body):
        if isinstance(atom, BuiltinAtom):
            pending.append((idx, atom))
            continue
        source = _delta if (_delta is not None and idx == _delta_at) else graph
        next_solutions = []
        for sol in solutions:
            if isinstance(atom, ClassAtom):
                cls_iri = Iri(ns + atom.cls)
                bound = sol.get(atom.var.name)
                for t in source.match_iter(
                    bound if isinstance(bound, Iri) else None, RDF_TYPE, cls_iri
                ):
                    if bound is not None and t.subject != bound:
                        continue
                    ns_sol = dict(sol)
                    ns_sol[atom.var.name] = t.subject
                    next_solutions.append(ns_sol)
            else:
                pred = Iri(ns + atom.prop)
                subj = sol.get(atom.subject.name)
                if subj is not None and not isinstance(subj, Iri):
                    continue
                value = atom.value
                binds_value = isinstance(value, Var) and value.name not in sol
                if isinstance(value, Var) and value.name in sol:
                    value = sol[value.name]  # previously bound: acts as a constant
                for t in _match_property(source, pred, subj, value, ns):
                    ns_sol = dict(sol)
                    ns_sol[atom.subject.name] = t.subject
                    if binds_value:
                        ns_sol[atom.value.name] = t.object
                    next_solutions.append(ns_sol)
        solutions = next_solutions
        if not solutions:
            return []
        # evaluate any builtin whose arguments are now all bound
        ready = [
            (i, b)
            for i, b in pending
            if all(not isinstance(a, Var) or a.name in solutions[0] for a in (b.left, b.right))
        ]
        if ready:
            pending = [p for p in pending if p not in ready]
            solutions = [s for s in solutions if run_builtins(s, ready)]
            if not solutions:
                return []
    if pending:
        solutions = [s for s in solutions if run_builtins(s, pending)]
    # deterministic order + dedupe
    seen = set()
    out = []
    for sol in solutions:
        key = tuple(sorted((k, term_sort_key(v)) for k, v in sol.items()))
        if key not in seen:
            seen.add(key)
            out.append(sol)
    out.sort(key=lambda s: tuple(sorted((k, term_sort_key(v)) for k, v in s.items())))
    return out


def instantiate_head(atom: Atom, bindings: dict[str, Term], ns: str) -> Triple:
    if isinstance(atom, ClassAtom):
        subj = bindings[atom.var.name]
        if not isinstance(subj, Iri):
            raise RuleEvalError(f"head subject ?{atom.var.name} bound to a literal")
        return Triple(subj, RDF_TYPE, Iri(ns + atom.cls))
    if isinstance(atom, PropertyAtom):
        subj = bindings[atom.subject.name]
        if not isinstance(subj, Iri):
            raise RuleEvalError(f"head subject ?{atom.subject.name} bound to a literal")
        value = atom.value
        if isinstance(value, Var):
            value = bindings[value.name]
        return Triple(subj, Iri(ns + atom.prop), _resolve_value(value, ns))
    raise RuleEvalError("builtin atoms cannot appear in heads")


@dataclass
class InferenceResult:
    derived: Graph
    proofs: list[ProofStep] = field(default_factory=list)


def _freeze_bindings(bindings: dict[str, Term]) -> tuple[tuple[str, Term], ...]:
    return tuple(sorted(bindings.items(), key=lambda kv: kv[0]))


def infer(graph: Graph, rules: Sequence[Rule], ns: str = DEFAULT_NS) -> InferenceResult:
    """Semi-naive forward chaining to fixpoint over `rules`.

    Returns the derived delta (triples not in the input graph) and one proof
    step per (rule, bindings, head atom) instantiation of a derived triple.
    """
    work = graph.copy()
    result = InferenceResult(derived=Graph())
    seen_steps: set[tuple] = set()

    def fire(rule: Rule, bindings_list) -> list[Triple]:
        new = []
        for bindings in bindings_list:
            frozen = _freeze_bindings(bindings)
            for atom in rule.head:
                t = instantiate_head(atom, bindings, ns)
                if t in graph:
                    continue  # already asserted, not a derivation
                key = (rule.name, frozen, t)
                if key in seen_steps:
                    continue
                seen_steps.add(key)
                result.proofs.append(ProofStep(t, rule.name, frozen))
                if t not in work:
                    new.append(t)
        return new

    # first round: naive evaluation over the full graph
    delta = Graph()
    for rule in rules:
        for t in fire(rule, evaluate_body(work, rule.body, ns=ns)):
            delta.insert(t)

    while len(delta):
        for t in delta:
            work.insert(t)
            result.derived.insert(t)
        next_delta = Graph()
        for rule in rules:
            positions = [i for i, a in enumerate(rule.body) if not isinstance(a, BuiltinAtom)]
            merged: list[dict[str, Term]] = []
            for i in positions:
                merged.extend(
                    evaluate_body(work, rule.body, ns=ns, _delta=delta, _delta_at=i)
                )
            for t in fire(rule, merged):
                if t not in work:
                    next_delta.insert(t)
        delta = next_delta
    return result


def infer_naive(graph: Graph, rules: Sequence[Rule], ns: str = DEFAULT_NS) -> Graph:
    """Reference evaluator: re-run every rule over the whole graph until no
    change. Used as an oracle for the semi-naive implementation."""
    work = graph.copy()
    derived = Graph()
    changed = True
    while changed:
        changed = False
        for rule in rules:
            for bindings in evaluate_body(work, rule.body, ns=ns):
                for atom in rule.head:
                    t = instantiate_head(atom, bindings, ns)
                    if work.insert(t):
                        derived.insert(t)
                        changed = True
    return derived


# ---------------------------------------------------------------------------
# explanation

@dataclass
class Explanation:
    step: ProofStep
    comparisons: list[str]
    supports: list[tuple[Triple, Optional["Explanation"]]]


def _rule_index(rules: Sequence[Rule]) -> dict[str, Rule]:
    return {r.name: r for r in rules}


def explain(
    proofs: Sequence[ProofStep],
    derived: Triple,
    rules: Sequence[Rule],
    ns: str = DEFAULT_NS,
) -> Explanation:
    """Proof tree for a derived triple: its proof step plus, recursively,
    explanations of body-supporting triples that were themselves derived."""
    by_triple: dict[Triple, ProofStep] = {}
    for step in proofs:
        by_triple.setdefault(step.derived, step)
    if derived not in by_triple:
        raise RuleEvalError(f"triple was not derived: {derived}")
    index = _rule_index(rules)
    return _explain(by_triple, derived, index, ns, frozenset())


def _explain(by_triple, derived, rule_index, ns, visiting) -> Explanation:
    step = by_triple[derived]
    bindings = step.binding_map()
    rule = rule_index.get(step.rule)
    comparisons: list[str] = []
    supports: list[tuple[Triple, Optional[Explanation]]] = []
    if rule is not None:
        for atom in rule.body:
            if isinstance(atom, BuiltinAtom):
                left = bindings[atom.left.name] if isinstance(atom.left, Var) else atom.left
                right = bindings[atom.right.name] if isinstance(atom.right, Var) else atom.right
                symbol = {
                    "lessThan": "<",
                    "lessThanOrEqualTo": "<=",
                    "greaterThan": ">",
                    "greaterThanOrEqualTo": ">=",
                    "equal": "=",
                }[atom.op]
                lname = f"?{atom.left.name} = " if isinstance(atom.left, Var) else ""
                comparisons.append(
                    f"{lname}{_numeric(left, atom)} {symbol} {_numeric(right, atom)}"
                )
                continue
            try:
                support = instantiate_head(atom, bindings, ns)
            except (KeyError, RuleEvalError):
                continue
            child = None
            if support in by_triple and support not in visiting:
                child = _explain(by_triple, support, rule_index, ns, visiting | {derived})
            supports.append((support, child))
    return Explanation(step, comparisons, supports)


def render_explanation(expl: Explanation, indent: int = 0) -> str:
    from .ntriples import serialize_triple

    pad = "  " * indent
    lines = [f"{pad}derived {serialize_triple(expl.step.derived)} by rule {expl.step.rule}"]
    shown = ", ".join(
        f"?{name} = {_term_text(term)}" for name, term in expl.step.bindings
    )
    if shown:
        lines.append(f"{pad}  bindings: {shown}")
    for comparison in expl.comparisons:
        lines.append(f"{pad}  satisfied: {comparison}")
    for support, child in expl.supports:
        if child is not None:
            lines.append(f"{pad}  from derived fact:")
            lines.append(render_explanation(child, indent + 2))
        else:
            lines.append(f"{pad}  from asserted fact: {serialize_triple(support)}")
    return "\n".join(lines)


def _term_text(term: Term) -> str:
    if isinstance(term, Iri):
        return term.value
    return term.canonical_lexical
