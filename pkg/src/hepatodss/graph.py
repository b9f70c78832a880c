"""In-memory triple store with SPO/POS/OSP indexes.

Set semantics over triples; every index answers exactly the same triple set
as a linear scan. Reads may run concurrently; writers must be serialized by
the caller.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional

from .terms import Iri, Term, Triple, triple_sort_key


class Graph:
    def __init__(self, triples: Iterable[Triple] = ()):
        # insertion-ordered set of triples
        self._triples: dict[Triple, None] = {}
        self._spo: dict[Iri, dict[Iri, set[Term]]] = {}
        self._pos: dict[Iri, dict[Term, set[Iri]]] = {}
        self._osp: dict[Term, dict[Iri, set[Iri]]] = {}
        for t in triples:
            self.insert(t)

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, t: Triple) -> bool:
        return t in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return set(self._triples) == set(other._triples)

    def copy(self) -> "Graph":
        return Graph(self._triples)

    def insert(self, t: Triple) -> bool:
        """Add a triple; returns True iff it was not already present."""
        if not isinstance(t, Triple):
            raise TypeError("expected a Triple")
        if t in self._triples:
            return False
        self._triples[t] = None
        self._spo.setdefault(t.subject, {}).setdefault(t.predicate, set()).add(t.object)
        self._pos.setdefault(t.predicate, {}).setdefault(t.object, set()).add(t.subject)
        self._osp.setdefault(t.object, {}).setdefault(t.subject, set()).add(t.predicate)
        return True

    def insert_all(self, triples: Iterable[Triple]) -> int:
        return sum(1 for t in triples if self.insert(t))

    def remove(self, t: Triple) -> bool:
        """Remove a triple; returns True iff it was present."""
        if t not in self._triples:
            return False
        del self._triples[t]
        self._spo[t.subject][t.predicate].discard(t.object)
        self._pos[t.predicate][t.object].discard(t.subject)
        self._osp[t.object][t.subject].discard(t.predicate)
        return True

    def match(
        self,
        s: Optional[Iri] = None,
        p: Optional[Iri] = None,
        o: Optional[Term] = None,
    ) -> list[Triple]:
        """All triples agreeing with the bound positions, in ascending
        (subject, predicate, object) order."""
        return sorted(self.match_iter(s, p, o), key=triple_sort_key)

    def match_iter(
        self,
        s: Optional[Iri] = None,
        p: Optional[Iri] = None,
        o: Optional[Term] = None,
    ) -> Iterator[Triple]:
        """Unordered variant of match, for inner loops."""
        if s is not None and p is not None and o is not None:
            t = Triple(s, p, o)
            if t in self._triples:
                yield t
            return
        if s is not None:
            by_p = self._spo.get(s)
            if not by_p:
                return
            if p is not None:
                for obj in by_p.get(p, ()):
                    yield Triple(s, p, obj)
            elif o is not None:
                for pred in self._osp.get(o, {}).get(s, ()):
                    yield Triple(s, pred, o)
            else:
                for pred, objs in by_p.items():
                    for obj in objs:
                        yield Triple(s, pred, obj)
            return
        if p is not None:
            by_o = self._pos.get(p)
            if not by_o:
                return
            if o is not None:
                for subj in by_o.get(o, ()):
                    yield Triple(subj, p, o)
            else:
                for obj, subjs in by_o.items():
                    for subj in subjs:
                        yield Triple(subj, p, obj)
            return
        if o is not None:
            for subj, preds in self._osp.get(o, {}).items():
                for pred in preds:
                    yield Triple(subj, pred, o)
            return
        yield from self._triples

    def count(
        self,
        s: Optional[Iri] = None,
        p: Optional[Iri] = None,
        o: Optional[Term] = None,
    ) -> int:
        """Cheap cardinality estimate for the pattern (exact)."""
        return sum(1 for _ in self.match_iter(s, p, o))

    def subjects(self) -> list[Iri]:
        """Distinct subjects in first-insertion order."""
        seen: dict[Iri, None] = {}
        for t in self._triples:
            seen.setdefault(t.subject, None)
        return list(seen)
