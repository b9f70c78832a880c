"""hepatodss: semantic decision support for liver-disease diagnosis.

Layers: an indexed RDF triple store with N-Triples round-tripping, a CART
decision tree whose root-to-leaf paths export as rules, a forward-chaining
rule reasoner with proof traces, a SPARQL-subset evaluator, micro-batch event
detection over record streams, ontology consistency checks and metrics, and a
clinician session workflow from lab entry to a guideline treatment plan.
"""

from .graph import Graph
from .ntriples import parse_ntriples, serialize_ntriples
from .terms import Iri, Literal, Triple

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "Iri",
    "Literal",
    "Triple",
    "parse_ntriples",
    "serialize_ntriples",
    "__version__",
]
