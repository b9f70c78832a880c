"""N-Triples reading and writing.

Grammar subset: IRI subjects/predicates, IRI or typed/plain literal objects,
one `.`-terminated statement per line, `#` comment lines. No blank nodes.
Serialization is canonical: statements sorted by (subject, predicate, object)
so equal graphs serialize byte-identically.
"""

from __future__ import annotations

from .errors import LiteralError, NTriplesParseError
from .graph import Graph
from .terms import XSD_STRING, Iri, Literal, Term, Triple

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}


def escape_string(s: str) -> str:
    out = []
    for c in s:
        if c in _ESCAPES:
            out.append(_ESCAPES[c])
        elif ord(c) < 0x20 or ord(c) == 0x7F:
            out.append(f"\\u{ord(c):04X}")
        else:
            out.append(c)
    return "".join(out)


class _LineParser:
    def __init__(self, line: str, line_no: int):
        self.line = line
        self.line_no = line_no
        self.pos = 0

    def error(self, message: str):
        raise NTriplesParseError(message, self.line_no, self.pos + 1)

    def skip_ws(self):
        while self.pos < len(self.line) and self.line[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.line)

    def expect(self, ch: str):
        if self.at_end() or self.line[self.pos] != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse_iri(self) -> Iri:
        self.expect("<")
        start = self.pos
        while True:
            if self.at_end():
                self.error("unterminated IRI")
            c = self.line[self.pos]
            if c == ">":
                break
            self.pos += 1
        value = self.line[start:self.pos]
        self.pos += 1
        try:
            return Iri(value)
        except LiteralError as exc:
            self.pos = start
            self.error(str(exc))

    def parse_literal(self) -> Literal:
        self.expect('"')
        out = []
        while True:
            if self.at_end():
                self.error("unterminated string literal")
            c = self.line[self.pos]
            if c == '"':
                self.pos += 1
                break
            if c == "\\":
                self.pos += 1
                if self.at_end():
                    self.error("dangling escape")
                e = self.line[self.pos]
                if e in _UNESCAPES:
                    out.append(_UNESCAPES[e])
                    self.pos += 1
                elif e == "u":
                    out.append(self._unicode_escape(4))
                elif e == "U":
                    out.append(self._unicode_escape(8))
                else:
                    self.error(f"bad escape \\{e}")
            else:
                out.append(c)
                self.pos += 1
        lexical = "".join(out)
        datatype = XSD_STRING
        if self.line.startswith("^^", self.pos):
            self.pos += 2
            datatype = self.parse_iri().value
        try:
            return Literal(lexical, datatype)
        except LiteralError as exc:
            self.error(str(exc))

    def _unicode_escape(self, width: int) -> str:
        hexpart = self.line[self.pos + 1 : self.pos + 1 + width]
        if len(hexpart) != width:
            self.error("truncated unicode escape")
        try:
            code = int(hexpart, 16)
        except ValueError:
            self.error(f"bad unicode escape \\u{hexpart}")
        self.pos += 1 + width
        return chr(code)

    def parse_statement(self) -> Triple:
        self.skip_ws()
        subject = self.parse_iri()
        self.skip_ws()
        predicate = self.parse_iri()
        self.skip_ws()
        if self.at_end():
            self.error("expected object term")
        obj: Term
        if self.line[self.pos] == "<":
            obj = self.parse_iri()
        elif self.line[self.pos] == '"':
            obj = self.parse_literal()
        else:
            self.error("expected IRI or literal object")
        self.skip_ws()
        if self.at_end() or self.line[self.pos] != ".":
            self.error("missing final '.'")
        self.pos += 1
        self.skip_ws()
        if not self.at_end():
            self.error("trailing content after '.'")
        return Triple(subject, predicate, obj)


def parse_ntriples(text: str) -> Graph:
    g = Graph()
    # split on '\n' only: other unicode line separators may occur inside
    # malformed input and must not silently break statements apart
    for line_no, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        g.insert(_LineParser(line, line_no).parse_statement())
    return g


def serialize_term(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{term.value}>"
    if term.datatype == XSD_STRING:
        return f'"{escape_string(term.canonical_lexical)}"'
    return f'"{escape_string(term.canonical_lexical)}"^^<{term.datatype}>'


def serialize_triple(t: Triple) -> str:
    return f"{serialize_term(t.subject)} {serialize_term(t.predicate)} {serialize_term(t.object)} ."


def serialize_ntriples(g: Graph) -> str:
    ordered = sorted(g, key=lambda t: (t.subject.value, t.predicate.value, serialize_term(t.object)))
    return "".join(serialize_triple(t) + "\n" for t in ordered)
