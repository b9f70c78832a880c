"""Schema layer: upper-ontology class skeleton, property declarations,
consistency checks, and structural metrics.

The built-in skeleton follows the continuant/occurrent split: entities that
persist through time versus entities that happen over time, with the standard
three continuant and four occurrent children. Domain classes and properties
are declared in a line-based schema file on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import SchemaError
from .graph import Graph
from .terms import RDF_TYPE, Iri

CONTINUANT = "Continuant"
OCCURRENT = "Occurrent"

_SKELETON: dict[str, Optional[str]] = {
    CONTINUANT: None,
    OCCURRENT: None,
    "IndependentContinuant": CONTINUANT,
    "GenericallyDependentContinuant": CONTINUANT,
    "SpecificallyDependentContinuant": CONTINUANT,
    "Process": OCCURRENT,
    "ProcessBoundary": OCCURRENT,
    "SpatiotemporalRegion": OCCURRENT,
    "TemporalRegion": OCCURRENT,
}

_DEFAULT_DISJOINT = (
    frozenset({CONTINUANT, OCCURRENT}),
    frozenset(
        {
            "IndependentContinuant",
            "GenericallyDependentContinuant",
            "SpecificallyDependentContinuant",
        }
    ),
)


@dataclass
class Schema:
    classes: dict[str, Optional[str]] = field(default_factory=dict)  # name -> parent
    object_properties: dict[str, tuple[Optional[str], Optional[str]]] = field(default_factory=dict)
    data_properties: dict[str, Optional[str]] = field(default_factory=dict)  # name -> domain
    disjoint_sets: list[frozenset[str]] = field(default_factory=list)
    annotations: dict[str, str] = field(default_factory=dict)

    def add_class(self, name: str, parent: Optional[str]):
        if parent is not None and parent not in self.classes:
            raise SchemaError(f"class {name!r} declares unknown parent {parent!r}")
        if name in self.classes:
            raise SchemaError(f"class {name!r} declared twice")
        self.classes[name] = parent
        self._check_acyclic(name)

    def _check_acyclic(self, start: str):
        seen = set()
        node: Optional[str] = start
        while node is not None:
            if node in seen:
                raise SchemaError(f"subclass cycle through {start!r}")
            seen.add(node)
            node = self.classes.get(node)

    def ancestors(self, name: str) -> set[str]:
        """The class itself plus all transitive parents."""
        out = set()
        node: Optional[str] = name
        while node is not None and node not in out:
            out.add(node)
            node = self.classes.get(node)
        return out

    def subclass_edges(self) -> int:
        return sum(1 for parent in self.classes.values() if parent is not None)


def bfo_skeleton() -> Schema:
    schema = Schema()
    schema.classes.update(_SKELETON)
    schema.disjoint_sets.extend(_DEFAULT_DISJOINT)
    return schema


def load_schema(text: str) -> Schema:
    """Parse a schema file on top of the built-in skeleton.

    Directives: `class <Name> sub <Parent>`, `objprop <name> [domain <C>]
    [range <C>]`, `dataprop <name> [domain <C>]`, `disjoint <A> <B> ...`,
    `annotation <name> <text...>`, `#` comments.
    """
    schema = bfo_skeleton()
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        directive = parts[0]
        try:
            if directive == "class":
                if len(parts) != 4 or parts[2] != "sub":
                    raise SchemaError("expected: class <Name> sub <Parent>")
                if parts[1] == parts[3]:
                    raise SchemaError(f"subclass cycle through {parts[1]!r}")
                schema.add_class(parts[1], parts[3])
            elif directive == "objprop":
                name, domain, range_ = parts[1], None, None
                rest = parts[2:]
                while rest:
                    key = rest.pop(0)
                    if key == "domain":
                        domain = rest.pop(0)
                    elif key == "range":
                        range_ = rest.pop(0)
                    else:
                        raise SchemaError(f"unknown objprop clause {key!r}")
                for cls in (domain, range_):
                    if cls is not None and cls not in schema.classes:
                        raise SchemaError(f"objprop {name!r} references unknown class {cls!r}")
                schema.object_properties[name] = (domain, range_)
            elif directive == "dataprop":
                name, domain = parts[1], None
                if len(parts) == 4 and parts[2] == "domain":
                    domain = parts[3]
                elif len(parts) != 2:
                    raise SchemaError("expected: dataprop <name> [domain <Class>]")
                if domain is not None and domain not in schema.classes:
                    raise SchemaError(f"dataprop {name!r} references unknown class {domain!r}")
                schema.data_properties[name] = domain
            elif directive == "disjoint":
                members = parts[1:]
                if len(members) < 2:
                    raise SchemaError("disjoint needs at least two classes")
                for cls in members:
                    if cls not in schema.classes:
                        raise SchemaError(f"disjoint references unknown class {cls!r}")
                schema.disjoint_sets.append(frozenset(members))
            elif directive == "annotation":
                if len(parts) < 3:
                    raise SchemaError("expected: annotation <name> <text>")
                schema.annotations[parts[1]] = " ".join(parts[2:])
            else:
                raise SchemaError(f"unknown directive {directive!r}")
        except IndexError:
            raise SchemaError(f"line {line_no}: truncated directive {stripped!r}")
        except SchemaError as exc:
            raise SchemaError(f"line {line_no}: {exc}")
    return schema


def _local_name(iri: Iri) -> str:
    value = iri.value
    for sep in ("#", "/"):
        if sep in value:
            value = value.rsplit(sep, 1)[1]
    return value


@dataclass(frozen=True)
class Violation:
    kind: str  # "disjoint" | "domain"
    subject: Iri
    detail: str


def check_consistency(schema: Schema, graph: Graph) -> list[Violation]:
    """Disjointness violations (an individual typed into two classes whose
    ancestors meet one disjoint set in different members) and domain
    violations (property assertions whose subject is not typed into the
    declared domain)."""
    violations: list[Violation] = []

    types_of: dict[Iri, set[str]] = {}
    for t in graph.match_iter(None, RDF_TYPE, None):
        if isinstance(t.object, Iri):
            name = _local_name(t.object)
            if name in schema.classes:
                types_of.setdefault(t.subject, set()).add(name)

    for subject in sorted(types_of, key=lambda s: s.value):
        names = types_of[subject]
        for dset in schema.disjoint_sets:
            hits: dict[str, str] = {}
            for name in sorted(names):
                for anc in schema.ancestors(name):
                    if anc in dset:
                        hits.setdefault(anc, name)
            if len(hits) > 1:
                members = ", ".join(f"{cls} (via {via})" for cls, via in sorted(hits.items()))
                violations.append(
                    Violation("disjoint", subject, f"typed into disjoint classes: {members}")
                )

    domains: dict[str, str] = {}
    for name, (domain, _) in schema.object_properties.items():
        if domain is not None:
            domains[name] = domain
    for name, domain in schema.data_properties.items():
        if domain is not None:
            domains[name] = domain

    for t in sorted(graph, key=lambda t: (t.subject.value, t.predicate.value)):
        prop = _local_name(t.predicate)
        domain = domains.get(prop)
        if domain is None:
            continue
        subject_types = types_of.get(t.subject, set())
        expanded = set()
        for name in subject_types:
            expanded |= schema.ancestors(name)
        if domain not in expanded:
            violations.append(
                Violation(
                    "domain",
                    t.subject,
                    f"property {prop} requires domain {domain}; subject types: "
                    f"{sorted(subject_types) or 'none'}",
                )
            )
    return violations


@dataclass(frozen=True)
class OntologyMetrics:
    attribute_richness: float
    class_richness: float
    average_population: float
    relationship_richness: float
    counts: dict

    def to_dict(self) -> dict:
        return {
            "Attribute Richness": self.attribute_richness,
            "Class Richness": self.class_richness,
            "Average Population": self.average_population,
            "Relationship Richness": self.relationship_richness,
            "counts": self.counts,
        }


def compute_metrics(schema: Schema, graph: Graph) -> OntologyMetrics:
    """AR = |Attribute|/|Class|, CR = |Class with instance|/|Class|,
    AP = |Individual|/|Class|, RR = |Prop|/(|SubClassOf| + |Prop|).

    "Class with instance" counts direct rdf:type assertions only.
    """
    n_classes = len(schema.classes)
    if n_classes == 0:
        raise SchemaError("metrics undefined for a schema with zero classes")
    n_attributes = len(schema.data_properties)
    n_props = len(schema.object_properties) + len(schema.data_properties)
    n_subclass = schema.subclass_edges()

    individuals: set[Iri] = set()
    instantiated: set[str] = set()
    for t in graph.match_iter(None, RDF_TYPE, None):
        individuals.add(t.subject)
        if isinstance(t.object, Iri):
            name = _local_name(t.object)
            if name in schema.classes:
                instantiated.add(name)

    counts = {
        "Class": n_classes,
        "Prop": n_props,
        "Attribute": n_attributes,
        "SubClassOf": n_subclass,
        "Individual": len(individuals),
        "Class with instance": len(instantiated),
    }
    return OntologyMetrics(
        attribute_richness=n_attributes / n_classes,
        class_richness=len(instantiated) / n_classes,
        average_population=len(individuals) / n_classes,
        relationship_richness=n_props / (n_subclass + n_props) if (n_subclass + n_props) else 0.0,
        counts=counts,
    )
