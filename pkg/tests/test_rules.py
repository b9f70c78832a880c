import random

import pytest
from hypothesis import given, settings, strategies as st

from hepatodss import assets
from hepatodss.errors import RuleEvalError, RuleParseError
from hepatodss.graph import Graph
from hepatodss.rules import (
    DEFAULT_NS,
    BuiltinAtom,
    ClassAtom,
    PropertyAtom,
    Rule,
    SymConst,
    Var,
    evaluate_body,
    explain,
    infer,
    infer_naive,
    parse_rule,
    parse_rules,
    render_explanation,
    serialize_rule,
)
from hepatodss.terms import (
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_INTEGER,
    Iri,
    Literal,
    Triple,
    boolean,
    float_,
    integer,
)

NS = DEFAULT_NS

HEPATITIS_SCREEN = (
    "Patient(?x) ^ hasValueAST(?x, ?ast) ^ swrlb:lessThanOrEqualTo(?ast, \"53.05\"^^xsd:float)"
    " ^ hasValueALP(?x, ?alp) ^ swrlb:lessThanOrEqualTo(?alp, \"52.3\"^^xsd:float)"
    " ^ hasValueBIL(?x, ?bil) ^ swrlb:lessThanOrEqualTo(?bil, \"11.0\"^^xsd:float)"
    " ^ hasValueALT(?x, ?alt) ^ swrlb:lessThanOrEqualTo(?alt, \"9.25\"^^xsd:float)"
    " -> isHepatitisCpatient(?x, true)"
)


def patient_graph(uid="p1", **labs) -> Graph:
    g = Graph()
    subject = Iri(NS + uid)
    g.insert(Triple(subject, RDF_TYPE, Iri(NS + "Patient")))
    for lab, value in labs.items():
        g.insert(Triple(subject, Iri(NS + f"hasValue{lab}"), float_(value)))
    return g


class TestParse:
    def test_hepatitis_screen_structure(self):
        rule = parse_rule(HEPATITIS_SCREEN)
        assert len(rule.body) == 9
        assert len(rule.head) == 1
        head = rule.head[0]
        assert isinstance(head, PropertyAtom)
        assert head.prop == "isHepatitisCpatient"
        assert head.value == Literal("true", XSD_BOOLEAN)

    def test_minimal_rule(self):
        rule = parse_rule("Patient(?x) -> isHealthy(?x, true)")
        assert rule.body == (ClassAtom("Patient", Var("x")),)

    def test_lifestyle_rule_multi_atom_head(self):
        rule = parse_rule(
            "HepatitisC_Patient(?p) -> needsLifestyleChange(?p, AvoidAlcohol)"
            " ^ needsVaccination(?p, HepatitisA) ^ needsVaccination(?p, HepatitisB)"
        )
        assert len(rule.head) == 3
        assert rule.head[1].value == SymConst("HepatitisA")

    def test_named_rule_prefix(self):
        rule = parse_rule("screen: Patient(?x) -> isHealthy(?x, true)")
        assert rule.name == "screen"

    def test_bare_numbers(self):
        rule = parse_rule(
            "hasFibrosisStage(?p, ?s) ^ swrlb:greaterThanOrEqualTo(?s, 0)"
            " ^ swrlb:lessThanOrEqualTo(?s, 2) -> EligibleForStandardTreatment(?p, true)"
        )
        builtin = rule.body[1]
        assert builtin.right == Literal("0", XSD_INTEGER)

    def test_unsafe_head_variable_rejected(self):
        with pytest.raises(RuleParseError, match="unsafe"):
            parse_rule("Patient(?x) -> isHealthy(?y, true)")

    def test_builtin_in_head_rejected(self):
        with pytest.raises(RuleParseError, match="head"):
            parse_rule("Patient(?x) ^ hasValueAST(?x, ?a) -> swrlb:lessThan(?a, 5)")

    def test_unknown_builtin_rejected(self):
        with pytest.raises(RuleParseError, match="swrlb:between"):
            parse_rule("Patient(?x) ^ hasValueAST(?x, ?a) ^ swrlb:between(?a, 5) -> isHealthy(?x, true)")

    def test_syntax_error_carries_position(self):
        with pytest.raises(RuleParseError) as exc:
            parse_rule("Patient(?x -> isHealthy(?x, true)")
        assert exc.value.position is not None

    def test_unbound_builtin_variable_rejected(self):
        with pytest.raises(RuleParseError, match="bound"):
            parse_rule("Patient(?x) ^ swrlb:lessThan(?a, 5) -> isHealthy(?x, true)")

    def test_rule_file_default_names_and_comments(self):
        rules = parse_rules(
            "# comment\n"
            "Patient(?x) -> isHealthy(?x, true)\n"
            "\n"
            "named: Patient(?x) -> isShowingSigns(?x, true)\n"
        )
        assert [r.name for r in rules] == ["r1", "named"]


class TestSerialize:
    def test_normalized_fixed_point(self):
        text = "Patient( ?x )   ->   isHealthy(?x , true)"
        once = serialize_rule(parse_rule(text))
        assert serialize_rule(parse_rule(once)) == once

    def test_hepatitis_screen_roundtrip(self):
        rule = parse_rule(HEPATITIS_SCREEN)
        assert parse_rule(serialize_rule(rule)) == rule

    def test_guideline_rules_roundtrip(self):
        for rule in assets.guideline_rules() + assets.diagnostic_rules():
            assert parse_rule(serialize_rule(rule)) == rule


_var_names = st.sampled_from(["x", "y", "p"])
_props = st.sampled_from(["hasValueAST", "hasTestResult", "needsMonitoring", "flag"])
_classes = st.sampled_from(["Patient", "MedicalRecord", "HCVRNA_Test"])
_values = st.one_of(
    _var_names.map(Var),
    st.integers(-100, 100).map(integer),
    st.floats(-100, 100, allow_nan=False).map(float_),
    st.booleans().map(boolean),
    st.sampled_from(["AvoidAlcohol", "every4Weeks", "Diuretics"]).map(SymConst),
)


@st.composite
def _rules(draw):
    subject = Var(draw(_var_names))
    body = [draw(st.one_of(
        st.builds(ClassAtom, _classes, st.just(subject)),
        st.builds(PropertyAtom, _props, st.just(subject), _values),
    ))]
    extra = draw(st.lists(st.builds(PropertyAtom, _props, st.just(subject), _values), max_size=3))
    body.extend(extra)
    numeric_vars = [
        a.value for a in body
        if isinstance(a, PropertyAtom) and isinstance(a.value, Var)
    ]
    if numeric_vars and draw(st.booleans()):
        body.append(
            BuiltinAtom(
                draw(st.sampled_from(["lessThan", "greaterThanOrEqualTo", "equal"])),
                draw(st.sampled_from(numeric_vars)),
                draw(st.floats(-50, 50, allow_nan=False).map(float_)),
            )
        )
    head = [draw(st.one_of(
        st.builds(ClassAtom, _classes, st.just(subject)),
        st.builds(PropertyAtom, _props, st.just(subject), st.one_of(
            st.integers(-100, 100).map(integer),
            st.booleans().map(boolean),
            st.sampled_from(["HepatitisA", "SodiumRestriction"]).map(SymConst),
        )),
    ))]
    name = draw(st.sampled_from(["", "screen", "g1"]))
    return Rule(name, tuple(body), tuple(head))


@settings(max_examples=300)
@given(_rules())
def test_randomized_rule_roundtrip(rule):
    assert parse_rule(serialize_rule(rule), default_name=rule.name) == rule


class TestEvaluateBody:
    def test_class_atom_bindings(self):
        g = Graph()
        for i in range(3):
            g.insert(Triple(Iri(NS + f"p{i}"), RDF_TYPE, Iri(NS + "Patient")))
        bindings = evaluate_body(g, parse_rule("Patient(?x) -> isHealthy(?x, true)").body)
        assert len(bindings) == 3

    def test_hepatitis_screen_one_binding(self):
        g = patient_graph(AST=40.0, ALP=50.0, BIL=10.0, ALT=9.0)
        rule = parse_rule(HEPATITIS_SCREEN)
        bindings = evaluate_body(g, rule.body)
        assert len(bindings) == 1
        assert bindings[0]["x"] == Iri(NS + "p1")
        assert bindings[0]["ast"].value == 40.0

    def test_first_comparison_fails(self):
        g = patient_graph(AST=60.0, ALP=50.0, BIL=10.0, ALT=9.0)
        assert evaluate_body(g, parse_rule(HEPATITIS_SCREEN).body) == []

    def test_numeric_constant_matches_by_value(self):
        g = Graph()
        subject = Iri(NS + "p1")
        g.insert(Triple(subject, Iri(NS + "hasFibrosisStage"), integer(2)))
        rule = parse_rule("hasFibrosisStage(?p, 2) -> EligibleForStandardTreatment(?p, true)")
        assert len(evaluate_body(g, rule.body)) == 1

    def test_builtin_on_non_numeric_value_errors(self):
        g = Graph()
        subject = Iri(NS + "p1")
        g.insert(Triple(subject, RDF_TYPE, Iri(NS + "Patient")))
        g.insert(Triple(subject, Iri(NS + "hasValueAST"), Literal("high")))
        rule = parse_rule(
            "Patient(?x) ^ hasValueAST(?x, ?a) ^ swrlb:lessThan(?a, 5) -> isHealthy(?x, true)"
        )
        with pytest.raises(RuleEvalError, match="swrlb:lessThan"):
            evaluate_body(g, rule.body)

    def test_seed_bindings_restrict(self):
        g = Graph()
        for i in range(3):
            g.insert(Triple(Iri(NS + f"p{i}"), RDF_TYPE, Iri(NS + "Patient")))
        rule = parse_rule("Patient(?x) -> isHealthy(?x, true)")
        bindings = evaluate_body(g, rule.body, bindings={"x": Iri(NS + "p1")})
        assert len(bindings) == 1


class TestInfer:
    def test_empty_rule_set(self):
        g = patient_graph(AST=40.0)
        result = infer(g, [])
        assert len(result.derived) == 0
        assert result.proofs == []

    def test_guideline_chain_avoid_alcohol(self):
        g = Graph()
        p = Iri(NS + "p9")
        test = Iri(NS + "t1")
        g.insert(Triple(p, RDF_TYPE, Iri(NS + "Patient")))
        g.insert(Triple(p, Iri(NS + "hasTestResult"), test))
        g.insert(Triple(test, RDF_TYPE, Iri(NS + "HCVRNA_Test")))
        g.insert(Triple(test, RDF_TYPE, Iri(NS + "PositiveResult")))
        result = infer(g, assets.guideline_rules())
        assert Triple(p, RDF_TYPE, Iri(NS + "HepatitisC_Patient")) in result.derived
        assert (
            Triple(p, Iri(NS + "needsLifestyleChange"), Iri(NS + "AvoidAlcohol"))
            in result.derived
        )

    def test_monotonic_no_retraction(self):
        g = patient_graph(AST=40.0, ALP=50.0, BIL=10.0, ALT=9.0)
        result = infer(g, assets.diagnostic_rules())
        for t in g:
            assert t not in result.derived  # delta holds only new facts
        merged = g.copy()
        merged.insert_all(result.derived)
        assert len(merged) == len(g) + len(result.derived)

    def test_fixpoint_idempotent(self):
        g = patient_graph(AST=40.0, ALP=50.0, BIL=10.0, ALT=9.0)
        rules = assets.diagnostic_rules()
        first = infer(g, rules)
        merged = g.copy()
        merged.insert_all(first.derived)
        second = infer(merged, rules)
        assert len(second.derived) == 0

    def test_every_proof_revalidates(self):
        g = patient_graph(AST=40.0, ALP=50.0, BIL=10.0, ALT=9.0)
        rules = assets.diagnostic_rules()
        result = infer(g, rules)
        by_name = {r.name: r for r in rules}
        assert result.proofs
        for step in result.proofs:
            rule = by_name[step.rule]
            assert evaluate_body(g, rule.body, bindings=step.binding_map())


def _random_graph(rng: random.Random) -> Graph:
    g = Graph()
    people = [Iri(NS + f"p{i}") for i in range(rng.randint(1, 5))]
    tests = [Iri(NS + f"t{i}") for i in range(rng.randint(1, 4))]
    for person in people:
        if rng.random() < 0.8:
            g.insert(Triple(person, RDF_TYPE, Iri(NS + "Patient")))
        if rng.random() < 0.7:
            g.insert(Triple(person, Iri(NS + "hasValueAST"), float_(rng.uniform(10, 90))))
        if rng.random() < 0.5:
            g.insert(Triple(person, Iri(NS + "hasTestResult"), rng.choice(tests)))
        if rng.random() < 0.3:
            g.insert(Triple(person, Iri(NS + "hasFibrosisStage"), integer(rng.randint(0, 4))))
    for test in tests:
        if rng.random() < 0.6:
            g.insert(Triple(test, RDF_TYPE, Iri(NS + "HCVRNA_Test")))
        if rng.random() < 0.5:
            g.insert(Triple(test, RDF_TYPE, Iri(NS + "PositiveResult")))
    return g


_CHAIN_RULES = parse_rules(
    "Patient(?p) ^ hasTestResult(?p, ?t) ^ HCVRNA_Test(?t) ^ PositiveResult(?t) -> HepatitisC_Patient(?p)\n"
    "HepatitisC_Patient(?p) -> needsLifestyleChange(?p, AvoidAlcohol)\n"
    "HepatitisC_Patient(?p) ^ hasFibrosisStage(?p, ?s) ^ swrlb:greaterThanOrEqualTo(?s, 3)"
    " -> NeedsSpecializedManagement(?p, hospitalized)\n"
    "Patient(?p) ^ hasValueAST(?p, ?a) ^ swrlb:greaterThan(?a, 53.05) -> ElevatedAST(?p)\n"
    "ElevatedAST(?p) ^ HepatitisC_Patient(?p) -> needsMonitoring(?p, every4Weeks)\n"
)


def test_semi_naive_matches_naive_oracle_on_random_graphs():
    rng = random.Random(20240901)
    for _ in range(20):
        g = _random_graph(rng)
        fast = infer(g, _CHAIN_RULES).derived
        slow = infer_naive(g, _CHAIN_RULES)
        assert fast == slow


def test_monotonicity_under_graph_growth():
    rng = random.Random(7)
    for _ in range(10):
        g1 = _random_graph(rng)
        g2 = g1.copy()
        extra = _random_graph(rng)
        g2.insert_all(extra)
        d1 = infer(g1, _CHAIN_RULES).derived
        d2 = infer(g2, _CHAIN_RULES).derived
        merged2 = g2.copy()
        merged2.insert_all(d2)
        for t in d1:
            assert t in merged2


class TestExplain:
    def test_single_step_tree(self):
        g = patient_graph(AST=40.0, ALP=50.0, BIL=10.0, ALT=9.0)
        rules = assets.diagnostic_rules()
        result = infer(g, rules)
        derived = result.derived.match(None, Iri(NS + "isHepatitisCpatient"), None)[0]
        expl = explain(result.proofs, derived, rules)
        assert expl.step.rule == "hepatitis_c_screen"
        assert len(expl.comparisons) == 4
        assert all(child is None for _, child in expl.supports)
        text = render_explanation(expl)
        assert "hepatitis_c_screen" in text
        assert "40.0 <= 53.05" in text

    def test_two_rule_chain_depth(self):
        g = Graph()
        p = Iri(NS + "p1")
        t1 = Iri(NS + "t1")
        g.insert(Triple(p, RDF_TYPE, Iri(NS + "Patient")))
        g.insert(Triple(p, Iri(NS + "hasTestResult"), t1))
        g.insert(Triple(t1, RDF_TYPE, Iri(NS + "HCVRNA_Test")))
        g.insert(Triple(t1, RDF_TYPE, Iri(NS + "PositiveResult")))
        result = infer(g, _CHAIN_RULES)
        lifestyle = result.derived.match(None, Iri(NS + "needsLifestyleChange"), None)[0]
        expl = explain(result.proofs, lifestyle, _CHAIN_RULES)
        derived_children = [child for _, child in expl.supports if child is not None]
        assert len(derived_children) == 1
        assert derived_children[0].step.rule == "r1"

    def test_chained_proofs_revalidate_against_closure(self):
        g = Graph()
        p = Iri(NS + "p1")
        t1 = Iri(NS + "t1")
        g.insert(Triple(p, RDF_TYPE, Iri(NS + "Patient")))
        g.insert(Triple(p, Iri(NS + "hasValueAST"), float_(60.0)))
        g.insert(Triple(p, Iri(NS + "hasTestResult"), t1))
        g.insert(Triple(t1, RDF_TYPE, Iri(NS + "HCVRNA_Test")))
        g.insert(Triple(t1, RDF_TYPE, Iri(NS + "PositiveResult")))
        result = infer(g, _CHAIN_RULES)
        closure = g.copy()
        closure.insert_all(result.derived)
        by_name = {r.name: r for r in _CHAIN_RULES}
        assert result.proofs
        for step in result.proofs:
            assert evaluate_body(closure, by_name[step.rule].body, bindings=step.binding_map())

    def test_not_derived_errors(self):
        g = patient_graph(AST=40.0, ALP=50.0, BIL=10.0, ALT=9.0)
        result = infer(g, assets.diagnostic_rules())
        bogus = Triple(Iri(NS + "p1"), Iri(NS + "isCirrhosisPatient"), boolean(True))
        with pytest.raises(RuleEvalError, match="not derived"):
            explain(result.proofs, bogus, assets.diagnostic_rules())
