"""Access to the data files shipped with the package: the HCV lab dataset,
the diagnostic and guideline rule sets, the benchmark rules, and the liver
schema."""

from __future__ import annotations

from importlib import resources

from .ontology import Schema, load_schema
from .rules import Rule, parse_rules


def _read(name: str) -> str:
    return resources.files("hepatodss.data").joinpath(name).read_text(encoding="utf-8")


def hcv_csv_text() -> str:
    """The UCI HCV lab panel: 615 records, 14 attributes."""
    return _read("hcvdat0.csv")


def diagnostic_rules() -> list[Rule]:
    return parse_rules(_read("dt_rules.swl"))


def guideline_rules() -> list[Rule]:
    return parse_rules(_read("guideline_rules.swl"))


def bench_rules() -> list[Rule]:
    return parse_rules(_read("bench_rules.swl"))


def liver_schema() -> Schema:
    return load_schema(_read("liver.onto"))


def liver_schema_text() -> str:
    return _read("liver.onto")
