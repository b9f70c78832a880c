"""HCV lab CSV ingestion: parse, mean-impute, encode, and emit RDF.

The source file is the UCI HCV panel: one row per patient with a category
label, age, sex, and ten serum lab values. Missing lab cells are imputed with
the column mean; categorical labels are mapped to small integers; every record
becomes one MedicalRecord subject with one triple per attribute.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .errors import CsvRowError, CsvSchemaError, EncodingError, ImputationError
from .graph import Graph
from .terms import RDF_TYPE, Iri, Triple, float_, integer

LAB_NAMES = ("ALB", "ALP", "ALT", "AST", "BIL", "CHE", "CHOL", "CREA", "GGT", "PROT")

# fixed feature order, also the split tie-break order for tree training
FEATURE_ORDER = ("Age", "Sex") + LAB_NAMES

# leading label token -> encoded category
CATEGORY_CODES = {"0": 0, "0s": 1, "1": 2, "2": 3, "3": 4}
SEX_CODES = {"f": 0, "m": 1}

CATEGORY_NAMES = {0: "Healthy", 1: "SuspectDonor", 2: "HepatitisC", 3: "Fibrosis", 4: "Cirrhosis"}

SCHEMA_NS = "http://schema.org/"
BASE_NS = "http://example.org/"

_MISSING = ("", "NA", "N/A", "na", "nan", "NaN")
_ID_COLUMNS = ("", "X", "ID", "SNo", "Sno")


@dataclass(frozen=True)
class RawRecord:
    row_id: int
    category_raw: str
    age: int
    sex_raw: str
    labs: dict[str, Optional[float]]


@dataclass(frozen=True)
class EncodedRecord:
    uid: Iri
    row_id: int
    category: int
    age: int
    sex: int
    labs: dict[str, float]

    def features(self) -> dict[str, float]:
        out = {"Age": float(self.age), "Sex": float(self.sex)}
        out.update(self.labs)
        return out


def load_csv(text: str) -> list[RawRecord]:
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    id_column = next((c for c in header if c in _ID_COLUMNS), None)
    required = ["Category", "Age", "Sex", *LAB_NAMES]
    for column in required:
        if column not in header:
            raise CsvSchemaError(f"missing required column {column!r}")
    if id_column is None:
        raise CsvSchemaError("missing row-id column (one of X, ID, SNo, or unnamed first column)")

    records: list[RawRecord] = []
    for row_no, row in enumerate(reader, start=2):
        raw_id = (row.get(id_column) or "").strip()
        try:
            row_id = int(raw_id) if raw_id else row_no - 1
        except ValueError:
            raise CsvRowError(f"row {row_no}: bad row id {raw_id!r}")
        category = (row.get("Category") or "").strip()
        sex = (row.get("Sex") or "").strip()
        if not category or not sex:
            raise CsvRowError(f"row {row_no}: Category and Sex must be present")
        try:
            age = int(float(row["Age"]))
        except (ValueError, TypeError):
            raise CsvRowError(f"row {row_no}: bad Age value {row.get('Age')!r}")
        labs: dict[str, Optional[float]] = {}
        for lab in LAB_NAMES:
            cell = (row.get(lab) or "").strip()
            if cell in _MISSING:
                labs[lab] = None
                continue
            try:
                labs[lab] = float(cell)
            except ValueError:
                raise CsvRowError(f"row {row_no}: non-numeric {lab} value {cell!r}")
        records.append(RawRecord(row_id, category, age, sex, labs))
    return records


def impute_means(records: Sequence[RawRecord]) -> list[RawRecord]:
    """Replace missing lab values with the column mean of observed values."""
    means: dict[str, float] = {}
    for lab in LAB_NAMES:
        observed = [r.labs[lab] for r in records if r.labs[lab] is not None]
        if records and not observed:
            raise ImputationError(f"column {lab} has no observed values to impute from")
        if observed:
            means[lab] = sum(observed) / len(observed)
    out = []
    for r in records:
        if any(v is None for v in r.labs.values()):
            labs = {lab: (v if v is not None else means[lab]) for lab, v in r.labs.items()}
            out.append(replace(r, labs=labs))
        else:
            out.append(r)
    return out


def encode(record: RawRecord, ns: str = BASE_NS) -> EncodedRecord:
    token = record.category_raw.split("=")[0].strip().lower()
    if token not in CATEGORY_CODES:
        raise EncodingError(f"unknown category label {record.category_raw!r}")
    sex_token = record.sex_raw.strip().lower()
    if sex_token not in SEX_CODES:
        raise EncodingError(f"unknown sex label {record.sex_raw!r}")
    missing = [lab for lab, v in record.labs.items() if v is None]
    if missing:
        raise EncodingError(f"record {record.row_id} still has missing labs: {missing}")
    return EncodedRecord(
        uid=Iri(f"{ns}uid/{record.row_id}"),
        row_id=record.row_id,
        category=CATEGORY_CODES[token],
        age=record.age,
        sex=SEX_CODES[sex_token],
        labs={lab: float(v) for lab, v in record.labs.items()},
    )


def records_to_graph(records: Sequence[EncodedRecord], schema_ns: str = SCHEMA_NS) -> Graph:
    """One rdf:type MedicalRecord triple plus one triple per attribute
    (SNo, Age, Sex, Category, ten labs) per record: 15 triples each."""
    g = Graph()
    type_iri = Iri(schema_ns + "MedicalRecord")
    preds = {name: Iri(schema_ns + name) for name in ("SNo", "Age", "Sex", "Category", *LAB_NAMES)}
    for r in records:
        g.insert(Triple(r.uid, RDF_TYPE, type_iri))
        g.insert(Triple(r.uid, preds["SNo"], integer(r.row_id)))
        g.insert(Triple(r.uid, preds["Age"], integer(r.age)))
        g.insert(Triple(r.uid, preds["Sex"], integer(r.sex)))
        g.insert(Triple(r.uid, preds["Category"], integer(r.category)))
        for lab in LAB_NAMES:
            g.insert(Triple(r.uid, preds[lab], float_(r.labs[lab])))
    return g


def ingest_csv(text: str, ns: str = BASE_NS) -> tuple[Graph, list[EncodedRecord]]:
    """Full pipeline: parse, impute, encode, and build the record graph."""
    records = [encode(r, ns) for r in impute_means(load_csv(text))]
    return records_to_graph(records), records
