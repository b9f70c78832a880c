"""RDF terms: IRIs, typed literals, and triples.

Literals carry an XSD datatype IRI kept as an opaque string. Numeric literals
compare by parsed value within their datatype ("7.10" equals "7.1" as floats),
so graphs deduplicate on value, and canonical serialization re-emits the
normalized lexical form.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Union

XSD = "http://www.w3.org/2001/XMLSchema#"
XSD_INTEGER = XSD + "integer"
XSD_FLOAT = XSD + "float"
XSD_DOUBLE = XSD + "double"
XSD_BOOLEAN = XSD + "boolean"
XSD_STRING = XSD + "string"

NUMERIC_DATATYPES = frozenset({XSD_INTEGER, XSD_FLOAT, XSD_DOUBLE})

RDF_TYPE_IRI = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

_INTEGER_RE = re.compile(r"^[+-]?[0-9]+$")
_DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")

from .errors import LiteralError


@dataclass(frozen=True, order=True)
class Iri:
    value: str

    def __post_init__(self):
        v = self.value
        if not v:
            raise LiteralError("IRI must be non-empty")
        if any(c.isspace() for c in v) or "<" in v or ">" in v:
            raise LiteralError(f"invalid IRI: {v!r}")

    def __repr__(self):
        return f"<{self.value}>"


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    # parsed value used for equality/hashing; derived, not part of identity input
    _key: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_key", _parse_value(self.lexical, self.datatype))

    @property
    def value(self):
        """Python-native value (int, float, bool, or str)."""
        return self._key

    @property
    def is_numeric(self) -> bool:
        return self.datatype in NUMERIC_DATATYPES

    @property
    def canonical_lexical(self) -> str:
        if self.datatype == XSD_INTEGER:
            return str(self._key)
        if self.datatype in (XSD_FLOAT, XSD_DOUBLE):
            return repr(self._key)
        if self.datatype == XSD_BOOLEAN:
            return "true" if self._key else "false"
        return self.lexical

    def __eq__(self, other):
        return (
            isinstance(other, Literal)
            and self.datatype == other.datatype
            and self._key == other._key
        )

    def __hash__(self):
        return hash((self.datatype, self._key))

    def __repr__(self):
        return f'"{self.canonical_lexical}"^^<{self.datatype}>'


def _parse_value(lexical: str, datatype: str):
    if datatype == XSD_INTEGER:
        if not _INTEGER_RE.match(lexical):
            raise LiteralError(f"not an integer lexical form: {lexical!r}")
        return int(lexical)
    if datatype in (XSD_FLOAT, XSD_DOUBLE):
        if not _DECIMAL_RE.match(lexical):
            raise LiteralError(f"not a decimal lexical form: {lexical!r}")
        value = float(lexical)
        if not math.isfinite(value):
            raise LiteralError(f"non-finite numeric literal: {lexical!r}")
        return value
    if datatype == XSD_BOOLEAN:
        if lexical not in ("true", "false"):
            raise LiteralError(f"boolean lexical must be 'true' or 'false', got {lexical!r}")
        return lexical == "true"
    return lexical


def integer(value: int) -> Literal:
    return Literal(str(int(value)), XSD_INTEGER)


def float_(value: float) -> Literal:
    return Literal(repr(float(value)), XSD_FLOAT)


def double(value: float) -> Literal:
    return Literal(repr(float(value)), XSD_DOUBLE)


def boolean(value: bool) -> Literal:
    return Literal("true" if value else "false", XSD_BOOLEAN)


def string(value: str) -> Literal:
    return Literal(value, XSD_STRING)


Term = Union[Iri, Literal]

RDF_TYPE = Iri(RDF_TYPE_IRI)


@dataclass(frozen=True)
class Triple:
    subject: Iri
    predicate: Iri
    object: Term

    def __post_init__(self):
        if not isinstance(self.subject, Iri):
            raise LiteralError("triple subject must be an IRI (blank nodes unsupported)")
        if not isinstance(self.predicate, Iri):
            raise LiteralError("triple predicate must be an IRI")
        if not isinstance(self.object, (Iri, Literal)):
            raise LiteralError("triple object must be an IRI or literal")


def term_sort_key(term: Term) -> tuple:
    """Total order over terms: IRIs first (by value), then literals."""
    if isinstance(term, Iri):
        return (0, term.value, "")
    return (1, term.datatype, term.canonical_lexical)


def triple_sort_key(t: Triple) -> tuple:
    return (t.subject.value, t.predicate.value, term_sort_key(t.object))
