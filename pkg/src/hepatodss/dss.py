"""Diagnosis-session orchestration: labs -> rule inference -> diagnosis ->
recommended tests -> report ingestion -> treatment plan.

Treatment follows the national hepatitis C algorithm: viremia-positive
patients without cirrhosis get sofosbuvir + daclatasvir; compensated
cirrhosis (Child-Pugh A) gets sofosbuvir + velpatasvir; decompensated
cirrhosis (Child-Pugh B/C) adds ribavirin, all for 12 weeks. Every plan item
carries a provenance tag naming the guideline rule or algorithm branch that
produced it.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import PreconditionError, ReportConflictError, SessionStateError
from .graph import Graph
from .ingest import LAB_NAMES
from .rules import DEFAULT_NS, Explanation, Rule, explain, infer
from .terms import RDF_TYPE, XSD_BOOLEAN, Iri, Literal, Triple, float_, integer

# diagnosis head properties, most severe first
DIAGNOSIS_PRECEDENCE = (
    ("isCirrhosisPatient", "Cirrhosis"),
    ("isFibrosisPatient", "Fibrosis"),
    ("isHepatitisCpatient", "HepatitisC"),
    ("isShowingSigns", "SignsOnly"),
    ("isHealthy", "Healthy"),
)

STATES = (
    "NEW",
    "LABS_ENTERED",
    "DIAGNOSED",
    "TESTS_RECOMMENDED",
    "REPORT_INGESTED",
    "TREATMENT_PLANNED",
)


@dataclass(frozen=True)
class PatientRecord:
    uid: str
    age: int
    sex: int
    labs: dict[str, float]

    def __post_init__(self):
        missing = [lab for lab in LAB_NAMES if lab not in self.labs]
        if missing:
            raise PreconditionError(f"missing labs: {missing}")
        for lab, value in self.labs.items():
            if not math.isfinite(float(value)):
                raise PreconditionError(f"lab {lab} must be finite, got {value!r}")
        if self.sex not in (0, 1):
            raise PreconditionError(f"sex must be 0 or 1, got {self.sex!r}")


def record_to_graph(record: PatientRecord, ns: str = DEFAULT_NS) -> Graph:
    g = Graph()
    uid = Iri(record.uid)
    g.insert(Triple(uid, RDF_TYPE, Iri(ns + "Patient")))
    g.insert(Triple(uid, Iri(ns + "hasValueAge"), integer(record.age)))
    g.insert(Triple(uid, Iri(ns + "hasValueSex"), integer(record.sex)))
    for lab in LAB_NAMES:
        g.insert(Triple(uid, Iri(ns + f"hasValue{lab}"), float_(record.labs[lab])))
    return g


@dataclass
class FiredRule:
    rule: str
    head_property: str
    comparisons: list[str]
    bindings: dict[str, object]
    rendered: str

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "head_property": self.head_property,
            "comparisons": self.comparisons,
            "bindings": self.bindings,
            "rendered": self.rendered,
        }


def diagnose(
    record: PatientRecord, rules: Sequence[Rule], ns: str = DEFAULT_NS
) -> tuple[str, list[FiredRule]]:
    """Materialize the record, run inference, and read the diagnosis off the
    derived head properties. No derived head -> Indeterminate; several ->
    most severe wins, all reported in the traces."""
    g = record_to_graph(record, ns)
    result = infer(g, rules, ns)
    uid = Iri(record.uid)
    true_lit = Literal("true", XSD_BOOLEAN)

    fired: list[FiredRule] = []
    diagnosis = "Indeterminate"
    for prop, label in DIAGNOSIS_PRECEDENCE:
        hits = result.derived.match(uid, Iri(ns + prop), true_lit)
        if not hits:
            continue
        if diagnosis == "Indeterminate":
            diagnosis = label
        for t in hits:
            for step in result.proofs:
                if step.derived != t:
                    continue
                expl = explain(result.proofs, t, rules, ns)
                fired.append(
                    FiredRule(
                        rule=step.rule,
                        head_property=prop,
                        comparisons=expl.comparisons,
                        bindings={
                            k: (v.value if isinstance(v, Literal) else v.value)
                            for k, v in step.bindings
                        },
                        rendered=_render_trace(expl),
                    )
                )
    return diagnosis, fired


def _render_trace(expl: Explanation) -> str:
    from .rules import render_explanation

    return render_explanation(expl)


RECOMMENDED_TESTS = {
    "HepatitisC": [
        {"test": "HCV RNA confirmation", "provenance": "guideline:g1_hcv_rna_diagnosis"},
        {"test": "Fibrosis staging", "provenance": "guideline:g2_standard_treatment_eligibility"},
        {"test": "Child-Pugh assessment", "provenance": "treatment_algorithm:cirrhosis_branch"},
    ],
    "Cirrhosis": [
        {"test": "Child-Pugh assessment", "provenance": "treatment_algorithm:cirrhosis_branch"},
        {
            "test": "Ultrasound",
            "interval": "every6Months",
            "provenance": "guideline:g9_hcc_screening",
        },
        {"test": "Upper endoscopy", "provenance": "guideline:g10_varices_screening"},
    ],
    "Fibrosis": [
        {"test": "Fibrosis staging", "provenance": "guideline:g3_specialized_management"},
    ],
    "SignsOnly": [
        {"test": "Liver function panel repeat", "provenance": "clinic:signs_followup"},
    ],
    "Indeterminate": [
        {"test": "Liver function panel repeat", "provenance": "clinic:indeterminate_followup"},
    ],
}


def recommend_tests(diagnosis: str) -> list[dict]:
    if diagnosis == "Healthy":
        raise PreconditionError("no tests are recommended for a healthy diagnosis")
    if diagnosis not in RECOMMENDED_TESTS:
        raise PreconditionError(f"unknown diagnosis {diagnosis!r}")
    return [dict(item) for item in RECOMMENDED_TESTS[diagnosis]]


@dataclass
class ReportFacts:
    hcv_rna: Optional[str] = None  # "positive" | "negative"
    fibrosis_stage: Optional[int] = None  # 0..4
    child_pugh: Optional[str] = None  # "A" | "B" | "C"
    ascites: Optional[str] = None  # "present" | "absent"
    decompensated: Optional[bool] = None
    recognized_lines: int = 0
    unrecognized_lines: int = 0

    def to_dict(self) -> dict:
        return {
            "hcv_rna": self.hcv_rna,
            "fibrosis_stage": self.fibrosis_stage,
            "child_pugh": self.child_pugh,
            "ascites": self.ascites,
            "decompensated": self.decompensated,
            "recognized_lines": self.recognized_lines,
            "unrecognized_lines": self.unrecognized_lines,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReportFacts":
        return cls(**{k: data.get(k) for k in (
            "hcv_rna", "fibrosis_stage", "child_pugh", "ascites", "decompensated",
            "recognized_lines", "unrecognized_lines",
        )})


_REPORT_PATTERNS = {
    "hcv_rna": re.compile(r"^\s*HCV\s+RNA\s*:\s*(POSITIVE|NEGATIVE)\s*$", re.IGNORECASE),
    "fibrosis_stage": re.compile(r"^\s*FIBROSIS\s+STAGE\s*:\s*F([0-4])\s*$", re.IGNORECASE),
    "child_pugh": re.compile(r"^\s*CHILD-PUGH\s*:\s*([ABC])\s*$", re.IGNORECASE),
    "ascites": re.compile(r"^\s*ASCITES\s*:\s*(PRESENT|ABSENT)\s*$", re.IGNORECASE),
}


def parse_report(text: str) -> ReportFacts:
    """Deterministic plaintext report reader. Recognized line patterns set
    fields; unrecognized lines are ignored but counted; contradictory
    duplicates are an error."""
    facts = ReportFacts()
    seen: dict[str, tuple[str, str]] = {}  # field -> (value, source line)
    for line in text.splitlines():
        if not line.strip():
            continue
        for fieldname, pattern in _REPORT_PATTERNS.items():
            m = pattern.match(line)
            if m:
                value = m.group(1).lower() if fieldname != "child_pugh" else m.group(1).upper()
                if fieldname in seen and seen[fieldname][0] != value:
                    raise ReportConflictError(
                        f"conflicting {fieldname} lines: {seen[fieldname][1]!r} vs {line.strip()!r}"
                    )
                seen[fieldname] = (value, line.strip())
                facts.recognized_lines += 1
                break
        else:
            facts.unrecognized_lines += 1
    if "hcv_rna" in seen:
        facts.hcv_rna = seen["hcv_rna"][0]
    if "fibrosis_stage" in seen:
        facts.fibrosis_stage = int(seen["fibrosis_stage"][0])
    if "child_pugh" in seen:
        facts.child_pugh = seen["child_pugh"][0]
    if "ascites" in seen:
        facts.ascites = seen["ascites"][0]
    if facts.child_pugh in ("B", "C") and facts.decompensated is None:
        facts.decompensated = True
    return facts


@dataclass
class TreatmentPlan:
    regimen: list[dict] = field(default_factory=list)
    duration_weeks: int = 0
    monitoring: list[dict] = field(default_factory=list)
    lifestyle: list[dict] = field(default_factory=list)
    referrals: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "regimen": self.regimen,
            "duration_weeks": self.duration_weeks,
            "monitoring": self.monitoring,
            "lifestyle": self.lifestyle,
            "referrals": self.referrals,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TreatmentPlan":
        return cls(
            regimen=data.get("regimen", []),
            duration_weeks=data.get("duration_weeks", 0),
            monitoring=data.get("monitoring", []),
            lifestyle=data.get("lifestyle", []),
            referrals=data.get("referrals", []),
        )


def _has_cirrhosis_marker(facts: ReportFacts) -> bool:
    return facts.child_pugh is not None or facts.fibrosis_stage == 4


def plan_treatment(facts: ReportFacts) -> TreatmentPlan:
    """Regimen selection per the treatment algorithm, plus monitoring,
    lifestyle, and referral items from the guideline rules."""
    if facts.hcv_rna is None:
        raise PreconditionError("treatment planning requires an HCV RNA result")
    plan = TreatmentPlan()

    if facts.hcv_rna == "negative":
        plan.lifestyle.append(
            {"advice": "Avoid alcohol", "provenance": "guideline:g7_lifestyle"}
        )
        plan.lifestyle.append(
            {
                "advice": "Hepatitis A and B vaccination",
                "provenance": "guideline:g7_lifestyle",
            }
        )
        return plan

    cirrhotic = _has_cirrhosis_marker(facts)
    if not cirrhotic:
        plan.regimen = [
            {"drug": "Sofosbuvir", "dose": "400mg", "provenance": "treatment_algorithm:no_cirrhosis"},
            {"drug": "Daclatasvir", "dose": "60mg", "provenance": "treatment_algorithm:no_cirrhosis"},
        ]
    elif facts.child_pugh in (None, "A"):
        branch = "treatment_algorithm:compensated_cirrhosis"
        plan.regimen = [
            {"drug": "Sofosbuvir", "dose": "400mg", "provenance": branch},
            {"drug": "Velpatasvir", "dose": "100mg", "provenance": branch},
        ]
    else:
        branch = "treatment_algorithm:decompensated_cirrhosis"
        plan.regimen = [
            {"drug": "Sofosbuvir", "dose": "400mg", "provenance": branch},
            {"drug": "Velpatasvir", "dose": "100mg", "provenance": branch},
            {"drug": "Ribavirin", "dose": "600-1200mg", "provenance": branch},
        ]
    plan.duration_weeks = 12

    plan.monitoring.append(
        {
            "action": "On-treatment review",
            "interval": "every4Weeks",
            "provenance": "guideline:g4_on_treatment_monitoring",
        }
    )
    plan.monitoring.append(
        {
            "action": "HCV RNA test (confirm sustained virological response)",
            "interval": "postTreatment12Weeks",
            "provenance": "guideline:g5_post_treatment_svr_test",
        }
    )
    plan.lifestyle.append({"advice": "Avoid alcohol", "provenance": "guideline:g7_lifestyle"})
    plan.lifestyle.append(
        {"advice": "Hepatitis A and B vaccination", "provenance": "guideline:g7_lifestyle"}
    )

    if facts.fibrosis_stage == 3:
        plan.referrals.append(
            {
                "action": "Specialized management referral",
                "provenance": "guideline:g3_specialized_management",
            }
        )
    if cirrhotic:
        plan.monitoring.append(
            {
                "action": "Ultrasound (hepatocellular carcinoma screening)",
                "interval": "every6Months",
                "provenance": "guideline:g9_hcc_screening",
            }
        )
        plan.monitoring.append(
            {
                "action": "Upper endoscopy (varices screening)",
                "provenance": "guideline:g10_varices_screening",
            }
        )
        plan.monitoring.append(
            {
                "action": "Hepatic encephalopathy monitoring",
                "provenance": "guideline:g11_encephalopathy_monitoring",
            }
        )
        plan.lifestyle.append(
            {
                "advice": "Abstain from alcohol completely",
                "provenance": "guideline:g14_alcohol_abstinence",
            }
        )
    if facts.ascites == "present":
        plan.regimen.append(
            {
                "drug": "Diuretics",
                "dose": "titrated to response",
                "provenance": "guideline:g12_ascites_management",
            }
        )
        plan.lifestyle.append(
            {"advice": "Sodium restriction", "provenance": "guideline:g12_ascites_management"}
        )
    if facts.decompensated:
        plan.referrals.append(
            {
                "action": "Liver transplant evaluation",
                "provenance": "guideline:g13_transplant_referral",
            }
        )
    return plan


def assess_followup(facts: ReportFacts) -> dict:
    """Verdict on the 12-weeks-post-treatment RNA test."""
    if facts.hcv_rna is None:
        raise PreconditionError("follow-up assessment requires an HCV RNA result")
    if facts.hcv_rna == "positive":
        return {
            "outcome": "NonResponder",
            "note": "Refer for retreatment evaluation",
            "provenance": "guideline:g6_non_responder",
        }
    return {
        "outcome": "SVR_achieved",
        "note": "Sustained virological response confirmed",
        "provenance": "guideline:g5_post_treatment_svr_test",
    }


@dataclass
class DiagnosisSession:
    id: str
    state: str = "NEW"
    record: Optional[PatientRecord] = None
    diagnosis: Optional[str] = None
    fired_rules: list[FiredRule] = field(default_factory=list)
    recommended: list[dict] = field(default_factory=list)
    report_text: Optional[str] = None
    report_facts: Optional[ReportFacts] = None
    plan: Optional[TreatmentPlan] = None

    def _require(self, *states: str):
        if self.state not in states:
            raise SessionStateError(
                f"session {self.id} is in state {self.state}, expected one of {states}"
            )

    def enter_labs(self, record: PatientRecord):
        self._require("NEW")
        self.record = record
        self.state = "LABS_ENTERED"

    def run_diagnosis(self, rules: Sequence[Rule], ns: str = DEFAULT_NS):
        self._require("LABS_ENTERED")
        self.diagnosis, self.fired_rules = diagnose(self.record, rules, ns)
        self.state = "DIAGNOSED"

    def recommend(self):
        self._require("DIAGNOSED")
        if self.diagnosis == "Healthy":
            raise SessionStateError("healthy sessions skip test recommendation")
        self.recommended = recommend_tests(self.diagnosis)
        self.state = "TESTS_RECOMMENDED"

    def ingest_report(self, text: str):
        self._require("TESTS_RECOMMENDED")
        self.report_facts = parse_report(text)
        self.report_text = text
        self.state = "REPORT_INGESTED"

    def finalize_plan(self) -> TreatmentPlan:
        if self.state == "TREATMENT_PLANNED":
            return self.plan
        self._require("REPORT_INGESTED")
        self.plan = plan_treatment(self.report_facts)
        self.state = "TREATMENT_PLANNED"
        return self.plan

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "state": self.state,
            "record": None
            if self.record is None
            else {
                "uid": self.record.uid,
                "age": self.record.age,
                "sex": self.record.sex,
                "labs": self.record.labs,
            },
            "diagnosis": self.diagnosis,
            "fired_rules": [f.to_dict() for f in self.fired_rules],
            "recommended_tests": self.recommended,
            "report_text": self.report_text,
            "report_facts": None if self.report_facts is None else self.report_facts.to_dict(),
            "plan": None if self.plan is None else self.plan.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DiagnosisSession":
        session = cls(id=data["id"], state=data.get("state", "NEW"))
        record = data.get("record")
        if record is not None:
            session.record = PatientRecord(
                uid=record["uid"], age=record["age"], sex=record["sex"], labs=record["labs"]
            )
        session.diagnosis = data.get("diagnosis")
        session.fired_rules = [
            FiredRule(
                rule=f["rule"],
                head_property=f["head_property"],
                comparisons=f["comparisons"],
                bindings=f["bindings"],
                rendered=f["rendered"],
            )
            for f in data.get("fired_rules", [])
        ]
        session.recommended = data.get("recommended_tests", [])
        session.report_text = data.get("report_text")
        facts = data.get("report_facts")
        if facts is not None:
            session.report_facts = ReportFacts.from_dict(facts)
        plan = data.get("plan")
        if plan is not None:
            session.plan = TreatmentPlan.from_dict(plan)
        return session


def explain_session(session: DiagnosisSession) -> str:
    """Deterministic template rendering of the session: identical sessions
    render byte-identical text."""
    if STATES.index(session.state) < STATES.index("DIAGNOSED"):
        raise SessionStateError("explanation requires a diagnosed session")
    lines = [f"Diagnosis: {session.diagnosis}"]
    if session.fired_rules:
        lines.append("Fired rules:")
        for fired in session.fired_rules:
            lines.append(f"  - {fired.rule} (derives {fired.head_property})")
            for comparison in fired.comparisons:
                lines.append(f"      satisfied: {comparison}")
    else:
        lines.append("Fired rules: none (no screening rule matched the lab panel)")
    if session.recommended:
        lines.append("Recommended tests:")
        for item in session.recommended:
            interval = f" ({item['interval']})" if "interval" in item else ""
            lines.append(f"  - {item['test']}{interval} [{item['provenance']}]")
    if session.plan is not None:
        plan = session.plan
        if plan.regimen:
            lines.append(f"Treatment plan ({plan.duration_weeks} weeks):")
            for item in plan.regimen:
                lines.append(f"  - {item['drug']} {item['dose']} [{item['provenance']}]")
        else:
            lines.append("Treatment plan: no antiviral regimen (viremia negative)")
        if plan.monitoring:
            lines.append("Monitoring:")
            for item in plan.monitoring:
                interval = f" ({item['interval']})" if "interval" in item else ""
                lines.append(f"  - {item['action']}{interval} [{item['provenance']}]")
        if plan.lifestyle:
            lines.append("Lifestyle:")
            for item in plan.lifestyle:
                lines.append(f"  - {item['advice']} [{item['provenance']}]")
        if plan.referrals:
            lines.append("Referrals:")
            for item in plan.referrals:
                lines.append(f"  - {item['action']} [{item['provenance']}]")
        if plan.regimen:
            lines.append(
                "Cautions: confirm HIV-negative status and non-pregnancy before starting "
                "antivirals; review liver function regularly."
            )
        if session.report_facts is not None and session.report_facts.child_pugh in ("B", "C"):
            lines.append(
                "Note: decompensated cirrhosis - expect adjustments in the medication "
                "regimen if adverse reactions occur during the 4-weekly reviews."
            )
    return "\n".join(lines) + "\n"
