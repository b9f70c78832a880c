import itertools
import random

import pytest

from hepatodss.errors import QueryParseError, QueryTypeError
from hepatodss.graph import Graph
from hepatodss.sparql import (
    FilterExpr,
    Query,
    TriplePattern,
    Var,
    evaluate,
    parse_query,
    rows_to_json,
    rows_to_tsv,
)
from hepatodss.terms import RDF_TYPE_IRI, Iri, Literal, Triple, float_, integer, string

NS = "http://schema.org/"

FIBROSIS_QUERY = """
PREFIX ns1: <http://schema.org/>
PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
PREFIX xsd: <http://www.w3.org/2001/XMLSchema#>
SELECT ?SNo ?ALT ?AST ?GGT ?ALB ?ALP ?BIL ?Category
WHERE {
    ?record rdf:type ns1:MedicalRecord ;
        ns1:SNo ?SNo ;
        ns1:ALT ?ALT ;
        ns1:AST ?AST ;
        ns1:GGT ?GGT ;
        ns1:ALB ?ALB ;
        ns1:ALP ?ALP ;
        ns1:Sex ?Sex ;
        ns1:BIL ?BIL ;
        ns1:Category ?Category.
    FILTER (?AST <= 53.05)
    FILTER (?ALT <= 9.65)
    FILTER (?ALP <= 52.3)
    FILTER (?AST > 33.9)
    FILTER (?BIL > 11.0)
}
"""

ORDERED_QUERY = """
PREFIX ns1: <http://schema.org/>
PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
PREFIX xsd: <http://www.w3.org/2001/XMLSchema#>
SELECT ?SNo ?ALT ?AST ?GGT ?ALB ?ALP ?BIL ?Category
WHERE {
    ?record rdf:type ns1:MedicalRecord ;
        ns1:SNo ?SNo ;
        ns1:ALT ?ALT ;
        ns1:AST ?AST ;
        ns1:GGT ?GGT ;
        ns1:ALB ?ALB ;
        ns1:ALP ?ALP ;
        ns1:Sex ?Sex ;
        ns1:BIL ?BIL ;
        ns1:Category ?Category.
    FILTER (?ALB >= 30.0)
    FILTER (?GGT >= 60.0)
}
ORDER BY ASC(?BIL)
"""


class TestParse:
    def test_minimal_query(self):
        q = parse_query("SELECT ?s WHERE { ?s <http://e.org/p> <http://e.org/o> }")
        assert len(q.patterns) == 1
        assert q.filters == []
        assert q.select == [Var("s")]

    def test_fibrosis_query_shape(self):
        q = parse_query(FIBROSIS_QUERY)
        # rdf:type plus nine attribute patterns in the ';' list
        assert len(q.patterns) == 10
        assert len(q.filters) == 5
        assert {(f.var.name, f.op, f.value) for f in q.filters} == {
            ("AST", "<=", 53.05),
            ("ALT", "<=", 9.65),
            ("ALP", "<=", 52.3),
            ("AST", ">", 33.9),
            ("BIL", ">", 11.0),
        }

    def test_ordered_query(self):
        q = parse_query(ORDERED_QUERY)
        assert len(q.filters) == 2
        assert q.order_by == (Var("BIL"), "ASC")

    def test_a_keyword_is_rdf_type(self):
        q = parse_query("PREFIX ns1: <http://schema.org/> SELECT ?s WHERE { ?s a ns1:MedicalRecord }")
        assert q.patterns[0].predicate == Iri(RDF_TYPE_IRI)

    def test_undeclared_prefix_rejected(self):
        with pytest.raises(QueryParseError, match="undeclared prefix"):
            parse_query("SELECT ?s WHERE { ?s ns1:AST ?v }")

    def test_unbound_select_var_rejected(self):
        with pytest.raises(QueryParseError, match="\\?missing"):
            parse_query("SELECT ?missing WHERE { ?s <http://e.org/p> ?v }")

    def test_unknown_operator_rejected(self):
        with pytest.raises(QueryParseError):
            parse_query(
                "SELECT ?v WHERE { ?s <http://e.org/p> ?v FILTER (?v <> 5) }"
            )

    def test_limit(self):
        q = parse_query("SELECT ?s WHERE { ?s <http://e.org/p> ?v } LIMIT 3")
        assert q.limit == 3

    def test_dangling_semicolon_tolerated(self):
        q = parse_query(
            "PREFIX ns1: <http://schema.org/> SELECT ?a WHERE { ?s ns1:p ?a ; . }"
        )
        assert len(q.patterns) == 1
        q = parse_query(
            "PREFIX ns1: <http://schema.org/> SELECT ?a WHERE { ?s ns1:p ?a ; }"
        )
        assert len(q.patterns) == 1


def record(g: Graph, sno: int, **values):
    uid = Iri(f"http://example.org/uid/{sno}")
    g.insert(Triple(uid, Iri(RDF_TYPE_IRI), Iri(NS + "MedicalRecord")))
    g.insert(Triple(uid, Iri(NS + "SNo"), integer(sno)))
    for key, value in values.items():
        lit = integer(value) if isinstance(value, int) else float_(value)
        g.insert(Triple(uid, Iri(NS + key), lit))
    return uid


class TestEvaluate:
    def test_empty_graph(self):
        assert evaluate(parse_query(FIBROSIS_QUERY), Graph()) == []

    def test_fibrosis_rows_from_panel(self, hcv_graph):
        rows = evaluate(parse_query(FIBROSIS_QUERY), hcv_graph)
        assert rows, "expected matches on the full panel"
        by_sno = {row["SNo"].value: row for row in rows}
        assert 576 in by_sno
        target = by_sno[576]
        assert target["ALT"].value == pytest.approx(7.1)
        assert target["AST"].value == pytest.approx(41.3)
        assert target["GGT"].value == pytest.approx(53.0)
        assert target["ALB"].value == pytest.approx(38.0)
        assert target["ALP"].value == pytest.approx(35.7)
        assert all(row["Category"].value == 3 for row in rows)

    def test_order_by_ascending_bil(self, hcv_graph):
        rows = evaluate(parse_query(ORDERED_QUERY), hcv_graph)
        bil = [row["BIL"].value for row in rows]
        assert bil == sorted(bil)

    def test_order_desc_is_reverse_of_asc(self, hcv_graph):
        asc = evaluate(parse_query(ORDERED_QUERY), hcv_graph)
        desc = evaluate(parse_query(ORDERED_QUERY.replace("ASC(?BIL)", "DESC(?BIL)")), hcv_graph)
        asc_bil = [row["BIL"].value for row in asc]
        assert [row["BIL"].value for row in desc] == list(reversed(asc_bil))

    def test_filter_never_adds_rows(self, hcv_graph):
        base = parse_query(ORDERED_QUERY)
        fewer_filters = Query(
            base.prefixes, base.select, base.patterns, base.filters[:1], base.order_by
        )
        with_all = evaluate(base, hcv_graph)
        with_fewer = evaluate(fewer_filters, hcv_graph)
        assert len(with_all) <= len(with_fewer)

    def test_pattern_order_invariance(self):
        g = Graph()
        record(g, 1, AST=40.0, BIL=12.0)
        record(g, 2, AST=60.0, BIL=5.0)
        q1 = parse_query(
            "PREFIX ns1: <http://schema.org/> SELECT ?SNo WHERE {"
            " ?r ns1:SNo ?SNo ; ns1:AST ?AST . FILTER (?AST <= 50) }"
        )
        q2 = parse_query(
            "PREFIX ns1: <http://schema.org/> SELECT ?SNo WHERE {"
            " ?r ns1:AST ?AST ; ns1:SNo ?SNo . FILTER (?AST <= 50) }"
        )
        assert evaluate(q1, g) == evaluate(q2, g)

    def test_bag_semantics_duplicates_kept(self):
        g = Graph()
        s1 = Iri("http://example.org/a")
        s2 = Iri("http://example.org/b")
        for s in (s1, s2):
            g.insert(Triple(s, Iri(NS + "val"), integer(7)))
        q = parse_query("PREFIX ns1: <http://schema.org/> SELECT ?v WHERE { ?s ns1:val ?v }")
        rows = evaluate(q, g)
        assert len(rows) == 2

    def test_non_numeric_filter_binding_errors(self):
        g = Graph()
        g.insert(Triple(Iri("http://example.org/a"), Iri(NS + "val"), string("high")))
        q = parse_query(
            "PREFIX ns1: <http://schema.org/> SELECT ?v WHERE { ?s ns1:val ?v FILTER (?v > 3) }"
        )
        with pytest.raises(QueryTypeError, match="non-numeric"):
            evaluate(q, g)


def exhaustive_oracle(query: Query, graph: Graph):
    """Enumerate every assignment of query variables to graph terms and keep
    the satisfying ones. Exponential; for small vocabularies only."""
    variables = sorted({v for p in query.patterns for v in p.variables()})
    terms = set()
    for t in graph:
        terms.update((t.subject, t.predicate, t.object))
    rows = []
    for combo in itertools.product(sorted(terms, key=repr), repeat=len(variables)):
        assignment = dict(zip(variables, combo))

        def resolve(term):
            return assignment[term.name] if isinstance(term, Var) else term

        ok = True
        for p in query.patterns:
            s, pr, o = resolve(p.subject), resolve(p.predicate), resolve(p.object)
            if not isinstance(s, Iri) or not isinstance(pr, Iri):
                ok = False
                break
            if Triple(s, pr, o) not in graph:
                ok = False
                break
        if not ok:
            continue
        for f in query.filters:
            binding = assignment[f.var.name]
            if not (isinstance(binding, Literal) and binding.is_numeric):
                ok = False
                break
            ops = {"<": float.__lt__, "<=": float.__le__, ">": float.__gt__,
                   ">=": float.__ge__, "=": float.__eq__, "!=": float.__ne__}
            if not ops[f.op](float(binding.value), f.value):
                ok = False
                break
        if ok:
            rows.append({v.name: assignment[v.name] for v in query.select})
    return rows


def test_evaluator_matches_exhaustive_oracle():
    rng = random.Random(424242)
    subjects = [Iri(f"http://example.org/s{i}") for i in range(6)]
    predicates = [Iri(NS + p) for p in ("p", "q")]
    objects = [integer(1), integer(2), float_(3.5), Iri("http://example.org/o1")]
    for trial in range(25):
        g = Graph()
        for _ in range(rng.randint(3, 30)):
            g.insert(
                Triple(rng.choice(subjects), rng.choice(predicates), rng.choice(objects))
            )
        patterns = [
            TriplePattern(Var("a"), rng.choice(predicates), Var("b")),
        ]
        if rng.random() < 0.6:
            patterns.append(TriplePattern(Var("a"), rng.choice(predicates), Var("c")))
        variables = sorted({v for p in patterns for v in p.variables()})
        filters = []
        if rng.random() < 0.5:
            filters.append(FilterExpr(Var("b"), rng.choice(["<", "<=", ">", ">=", "="]),
                                      rng.choice([1.0, 2.0, 3.5])))
        query = Query({}, [Var(v) for v in variables], patterns, filters)
        try:
            ours = evaluate(query, g)
        except QueryTypeError:
            continue  # oracle treats non-numeric as non-match; skip those trials
        expected = exhaustive_oracle(query, g)
        key = lambda row: tuple(repr(row[v]) for v in sorted(row))
        assert sorted(map(key, ours)) == sorted(map(key, expected)), f"trial {trial}"


class TestResultFormats:
    def test_tsv(self):
        g = Graph()
        record(g, 5, AST=41.3)
        q = parse_query(
            "PREFIX ns1: <http://schema.org/> SELECT ?SNo ?AST WHERE {"
            " ?r ns1:SNo ?SNo ; ns1:AST ?AST }"
        )
        text = rows_to_tsv(q, evaluate(q, g))
        assert text == "SNo\tAST\n5\t41.3\n"

    def test_json(self):
        g = Graph()
        record(g, 5, AST=41.3)
        q = parse_query(
            "PREFIX ns1: <http://schema.org/> SELECT ?SNo ?AST WHERE {"
            " ?r ns1:SNo ?SNo ; ns1:AST ?AST }"
        )
        assert '"SNo": 5' in rows_to_json(q, evaluate(q, g))
