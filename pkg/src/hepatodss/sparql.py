"""SPARQL subset: PREFIX, SELECT, basic graph patterns with `;` predicate
lists, numeric FILTERs, ORDER BY, LIMIT.

Evaluation is a natural join over pattern solutions with filters applied as
soon as their variable is bound. Rows keep bag semantics; without ORDER BY
they are returned in canonical term order for determinism.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import QueryParseError, QueryTypeError
from .graph import Graph
from .terms import (
    RDF_TYPE_IRI,
    XSD_FLOAT,
    XSD_INTEGER,
    Iri,
    Literal,
    Term,
    term_sort_key,
)

_COMPARE = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self):
        return f"?{self.name}"


PatternTerm = Union[Var, Iri, Literal]


@dataclass(frozen=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def variables(self) -> set[str]:
        return {t.name for t in (self.subject, self.predicate, self.object) if isinstance(t, Var)}


@dataclass(frozen=True)
class FilterExpr:
    var: Var
    op: str
    value: float


@dataclass
class Query:
    prefixes: dict[str, str]
    select: list[Var]
    patterns: list[TriplePattern]
    filters: list[FilterExpr] = field(default_factory=list)
    order_by: Optional[tuple[Var, str]] = None  # (var, "ASC" | "DESC")
    limit: Optional[int] = None


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<iri><[^<>\s]*>)
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<number>[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<pname>[A-Za-z_][A-Za-z0-9_-]*:[A-Za-z_][A-Za-z0-9_.-]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|!=|=|<|>)
  | (?P<punct>[{}();.,:^])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise QueryParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    return tokens


class _QueryParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.prefixes: dict[str, str] = {}

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise QueryParseError("unexpected end of query", len(self.text))
        self.i += 1
        return tok

    def keyword(self, word: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.kind == "ident" and tok.text.upper() == word:
            self.i += 1
            return True
        return False

    def expect_punct(self, ch: str):
        tok = self.next()
        if tok.kind != "punct" or tok.text != ch:
            raise QueryParseError(f"expected {ch!r}, got {tok.text!r}", tok.pos)

    def parse(self) -> Query:
        while self.keyword("PREFIX"):
            tok = self.next()
            if tok.kind == "pname" and tok.text.endswith(":"):
                prefix = tok.text[:-1]
            elif tok.kind == "ident":
                prefix = tok.text
                self.expect_punct(":")
            elif tok.kind == "punct" and tok.text == ":":
                prefix = ""
                self.i -= 1
                self.expect_punct(":")
            else:
                raise QueryParseError(f"bad prefix declaration at {tok.text!r}", tok.pos)
            iri = self.next()
            if iri.kind != "iri":
                raise QueryParseError("PREFIX requires an <IRI>", iri.pos)
            self.prefixes[prefix] = iri.text[1:-1]

        if not self.keyword("SELECT"):
            tok = self.peek()
            raise QueryParseError("expected SELECT", tok.pos if tok else len(self.text))
        select: list[Var] = []
        while self.peek() is not None and self.peek().kind == "var":
            select.append(Var(self.next().text[1:]))
        if not select:
            raise QueryParseError("SELECT needs at least one variable", self.peek().pos if self.peek() else 0)

        if not self.keyword("WHERE"):
            tok = self.peek()
            raise QueryParseError("expected WHERE", tok.pos if tok else len(self.text))
        self.expect_punct("{")
        patterns: list[TriplePattern] = []
        filters: list[FilterExpr] = []
        while True:
            tok = self.peek()
            if tok is None:
                raise QueryParseError("unterminated WHERE group", len(self.text))
            if tok.kind == "punct" and tok.text == "}":
                self.next()
                break
            if tok.kind == "ident" and tok.text.upper() == "FILTER":
                self.next()
                filters.append(self._parse_filter())
                continue
            patterns.extend(self._parse_triple_block())

        order_by = None
        if self.keyword("ORDER"):
            if not self.keyword("BY"):
                tok = self.peek()
                raise QueryParseError("expected BY after ORDER", tok.pos if tok else len(self.text))
            direction = "ASC"
            tok = self.peek()
            if tok is not None and tok.kind == "ident" and tok.text.upper() in ("ASC", "DESC"):
                direction = self.next().text.upper()
                self.expect_punct("(")
                var_tok = self.next()
                if var_tok.kind != "var":
                    raise QueryParseError("ORDER BY needs a variable", var_tok.pos)
                order_by = (Var(var_tok.text[1:]), direction)
                self.expect_punct(")")
            else:
                var_tok = self.next()
                if var_tok.kind != "var":
                    raise QueryParseError("ORDER BY needs a variable", var_tok.pos)
                order_by = (Var(var_tok.text[1:]), direction)

        limit = None
        if self.keyword("LIMIT"):
            tok = self.next()
            if tok.kind != "number" or not tok.text.isdigit():
                raise QueryParseError("LIMIT needs a non-negative integer", tok.pos)
            limit = int(tok.text)

        if self.peek() is not None:
            raise QueryParseError(f"trailing content {self.peek().text!r}", self.peek().pos)

        query = Query(self.prefixes, select, patterns, filters, order_by, limit)
        _validate(query)
        return query

    def _parse_term(self) -> PatternTerm:
        tok = self.next()
        if tok.kind == "var":
            return Var(tok.text[1:])
        if tok.kind == "iri":
            return Iri(tok.text[1:-1])
        if tok.kind == "pname":
            prefix, _, local = tok.text.partition(":")
            if prefix not in self.prefixes:
                raise QueryParseError(f"undeclared prefix {prefix!r}", tok.pos)
            return Iri(self.prefixes[prefix] + local)
        if tok.kind == "ident" and tok.text == "a":
            return Iri(RDF_TYPE_IRI)
        if tok.kind == "number":
            if re.fullmatch(r"[+-]?\d+", tok.text):
                return Literal(tok.text, XSD_INTEGER)
            return Literal(tok.text, XSD_FLOAT)
        if tok.kind == "string":
            lexical = tok.text[1:-1]
            nxt = self.peek()
            if nxt is not None and nxt.kind == "punct" and nxt.text == "^":
                self.next()
                self.expect_punct("^")
                dt = self._parse_term()
                if not isinstance(dt, Iri):
                    raise QueryParseError("literal datatype must be an IRI", tok.pos)
                return Literal(lexical, dt.value)
            return Literal(lexical)
        raise QueryParseError(f"unexpected term {tok.text!r}", tok.pos)

    def _parse_triple_block(self) -> list[TriplePattern]:
        subject = self._parse_term()
        patterns = []
        while True:
            predicate = self._parse_term()
            obj = self._parse_term()
            patterns.append(TriplePattern(subject, predicate, obj))
            tok = self.peek()
            if tok is not None and tok.kind == "punct" and tok.text == ";":
                self.next()
                # tolerate a dangling ';' before '.' or '}'
                nxt = self.peek()
                if nxt is not None and nxt.kind == "punct" and nxt.text in (".", "}"):
                    break
                continue
            break
        tok = self.peek()
        if tok is not None and tok.kind == "punct" and tok.text == ".":
            self.next()
        return patterns

    def _parse_filter(self) -> FilterExpr:
        self.expect_punct("(")
        var_tok = self.next()
        if var_tok.kind != "var":
            raise QueryParseError("FILTER must start with a variable", var_tok.pos)
        op_tok = self.next()
        if op_tok.kind != "op":
            raise QueryParseError(f"unknown operator {op_tok.text!r}", op_tok.pos)
        num_tok = self.next()
        if num_tok.kind != "number":
            raise QueryParseError("FILTER compares against a numeric literal", num_tok.pos)
        self.expect_punct(")")
        return FilterExpr(Var(var_tok.text[1:]), op_tok.text, float(num_tok.text))


def _validate(query: Query):
    pattern_vars: set[str] = set()
    for p in query.patterns:
        pattern_vars |= p.variables()
    for v in query.select:
        if v.name not in pattern_vars:
            raise QueryParseError(f"select variable ?{v.name} does not appear in any pattern")
    for f in query.filters:
        if f.var.name not in pattern_vars:
            raise QueryParseError(f"filter variable ?{f.var.name} does not appear in any pattern")
    if query.order_by and query.order_by[0].name not in pattern_vars:
        raise QueryParseError(
            f"order variable ?{query.order_by[0].name} does not appear in any pattern"
        )


def parse_query(text: str) -> Query:
    return _QueryParser(text).parse()


# ---------------------------------------------------------------------------
# evaluation

def _order_key(term: Term) -> tuple:
    """Sort key: numbers numerically first, then other literals, then IRIs."""
    if isinstance(term, Literal) and term.is_numeric:
        return (0, float(term.value), "", "")
    if isinstance(term, Literal):
        return (1, 0.0, term.datatype, term.canonical_lexical)
    return (2, 0.0, "", term.value)


def _filter_value(binding: Term, f: FilterExpr, row_id: str) -> float:
    if isinstance(binding, Literal) and binding.is_numeric:
        return float(binding.value)
    raise QueryTypeError(
        f"filter ?{f.var.name} {f.op} {f.value}: non-numeric binding {binding!r} in row {row_id}"
    )


def evaluate(query: Query, graph: Graph) -> list[dict[str, Term]]:
    # most selective pattern first (exact index cardinality of bound positions)
    def selectivity(p: TriplePattern) -> int:
        s = p.subject if isinstance(p.subject, Iri) else None
        pr = p.predicate if isinstance(p.predicate, Iri) else None
        o = p.object if not isinstance(p.object, Var) else None
        return graph.count(s, pr, o)

    remaining = sorted(query.patterns, key=selectivity)
    ordered: list[TriplePattern] = []
    bound_vars: set[str] = set()
    # left-deep: prefer patterns sharing a variable with what's already joined
    while remaining:
        connected = [p for p in remaining if p.variables() & bound_vars] or remaining
        best = min(connected, key=lambda p: (selectivity(p), remaining.index(p)))
        remaining.remove(best)
        ordered.append(best)
        bound_vars |= best.variables()

    filters_left = list(query.filters)
    solutions: list[dict[str, Term]] = [{}]
    seen_vars: set[str] = set()
    for pattern in ordered:
        next_solutions = []
        for sol in solutions:
            s = _resolve(pattern.subject, sol)
            p = _resolve(pattern.predicate, sol)
            o = _resolve(pattern.object, sol)
            if isinstance(s, Literal) or isinstance(p, Literal):
                continue  # literals cannot appear in subject/predicate position
            for t in graph.match_iter(s, p, o):
                ns_sol = dict(sol)
                ok = True
                for term, value in (
                    (pattern.subject, t.subject),
                    (pattern.predicate, t.predicate),
                    (pattern.object, t.object),
                ):
                    if isinstance(term, Var):
                        if term.name in ns_sol and ns_sol[term.name] != value:
                            ok = False
                            break
                        ns_sol[term.name] = value
                if ok:
                    next_solutions.append(ns_sol)
        solutions = next_solutions
        if not solutions:
            return []
        seen_vars |= pattern.variables()
        ready = [f for f in filters_left if f.var.name in seen_vars]
        if ready:
            filters_left = [f for f in filters_left if f not in ready]
            kept = []
            for sol in solutions:
                row_id = _row_label(sol, query)
                if all(
                    _COMPARE[f.op](_filter_value(sol[f.var.name], f, row_id), f.value)
                    for f in ready
                ):
                    kept.append(sol)
            solutions = kept
            if not solutions:
                return []

    rows = [{v.name: sol[v.name] for v in query.select} for sol in solutions]

    if query.order_by is not None:
        var, direction = query.order_by
        rows.sort(key=lambda r: _order_key(r[var.name]), reverse=(direction == "DESC"))
    else:
        rows.sort(key=lambda r: tuple(term_sort_key(r[v.name]) for v in query.select))
    if query.limit is not None:
        rows = rows[: query.limit]
    return rows


def _resolve(term: PatternTerm, sol: dict[str, Term]):
    if isinstance(term, Var):
        return sol.get(term.name)
    return term


def _row_label(sol: dict[str, Term], query: Query) -> str:
    first = query.select[0].name
    if first in sol:
        return f"?{first}={_plain(sol[first])}"
    return "<partial>"


# ---------------------------------------------------------------------------
# result serialization

def _plain(term: Term):
    if isinstance(term, Iri):
        return term.value
    return term.value


def rows_to_json(query: Query, rows: list[dict[str, Term]]) -> str:
    out = [{v.name: _plain(row[v.name]) for v in query.select} for row in rows]
    return json.dumps(out, indent=2)


def rows_to_tsv(query: Query, rows: list[dict[str, Term]]) -> str:
    header = "\t".join(v.name for v in query.select)
    lines = [header]
    for row in rows:
        cells = []
        for v in query.select:
            term = row[v.name]
            cells.append(term.value if isinstance(term, Iri) else term.canonical_lexical)
        lines.append("\t".join(str(c) for c in cells))
    return "\n".join(lines) + "\n"
