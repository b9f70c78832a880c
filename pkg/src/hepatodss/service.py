"""JSON-over-HTTP facade: dataset ingestion, rule deployment, querying,
inference, streaming benchmarks, ontology metrics, and diagnosis sessions.

Graph ids are content-addressed (hash of the canonical N-Triples), so
re-uploading a dataset is idempotent. State persists to a data directory as
canonical N-Triples, rule files, and session JSON; restart reloads it.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import assets, stream as stream_mod
from .dss import DiagnosisSession, PatientRecord, explain_session
from .errors import (
    DataError,
    PreconditionError,
    ReportConflictError,
    SessionStateError,
)
from .graph import Graph
from .ingest import SCHEMA_NS, ingest_csv
from .ntriples import parse_ntriples, serialize_ntriples
from .ontology import compute_metrics
from .rules import parse_rule, parse_rules, serialize_rules
from .sparql import evaluate as sparql_evaluate, parse_query

_STATUS = {
    "bad_request": 400,
    "not_found": 404,
    "conflict": 409,
    "precondition_failed": 412,
    "internal": 500,
}


class ServiceError(Exception):
    def __init__(self, code: str, message: str, detail: Optional[dict] = None):
        super().__init__(message)
        self.code = code if code in _STATUS else "internal"
        self.message = message
        self.detail = detail


class TextGenClient:
    """Optional remote text-generation post-processor for explanations.
    Configured via TEXTGEN_URL / TEXTGEN_KEY; absent configuration means
    template-only explanations."""

    def __init__(self, url: str, key: Optional[str] = None, timeout: float = 10.0):
        self.url = url
        self.key = key
        self.timeout = timeout

    @classmethod
    def from_env(cls) -> Optional["TextGenClient"]:
        url = os.environ.get("TEXTGEN_URL")
        if not url:
            return None
        return cls(url, os.environ.get("TEXTGEN_KEY"))

    def enhance(self, text: str) -> Optional[str]:
        try:
            import httpx

            headers = {"Authorization": f"Bearer {self.key}"} if self.key else {}
            response = httpx.post(
                self.url, json={"text": text}, headers=headers, timeout=self.timeout
            )
            response.raise_for_status()
            return response.json().get("text")
        except Exception:
            return None  # enhancement is best-effort; template text stands


class AppState:
    def __init__(self, data_dir: Optional[Path] = None, textgen: Optional[TextGenClient] = None):
        self.data_dir = Path(data_dir) if data_dir else None
        self.textgen = textgen
        self.graphs: dict[str, Graph] = {}
        self.engine = stream_mod.StreamEngine(ns=SCHEMA_NS)
        self.sessions: dict[str, DiagnosisSession] = {}
        self.diagnostic_rules = assets.diagnostic_rules()
        self.schema = assets.liver_schema()
        self._lock = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = {}
        if self.data_dir is not None:
            self._load()

    # -- persistence --------------------------------------------------------

    def _load(self):
        graphs_dir = self.data_dir / "graphs"
        if graphs_dir.is_dir():
            for path in sorted(graphs_dir.glob("*.nt")):
                self.graphs[path.stem] = parse_ntriples(path.read_text(encoding="utf-8"))
        rules_path = self.data_dir / "rules" / "active.swl"
        if rules_path.is_file():
            for rule in parse_rules(rules_path.read_text(encoding="utf-8")):
                self.engine.deploy_rule(rule)
        sessions_dir = self.data_dir / "sessions"
        if sessions_dir.is_dir():
            for path in sorted(sessions_dir.glob("*.json")):
                session = DiagnosisSession.from_dict(json.loads(path.read_text(encoding="utf-8")))
                self.sessions[session.id] = session

    def persist(self):
        if self.data_dir is None:
            return
        graphs_dir = self.data_dir / "graphs"
        rules_dir = self.data_dir / "rules"
        sessions_dir = self.data_dir / "sessions"
        for d in (graphs_dir, rules_dir, sessions_dir):
            d.mkdir(parents=True, exist_ok=True)
        for graph_id, graph in self.graphs.items():
            path = graphs_dir / f"{graph_id}.nt"
            if not path.exists():
                path.write_text(serialize_ntriples(graph), encoding="utf-8")
        (rules_dir / "active.swl").write_text(
            serialize_rules(self.engine.active_rules()), encoding="utf-8"
        )
        for session in self.sessions.values():
            (sessions_dir / f"{session.id}.json").write_text(
                json.dumps(session.to_dict(), indent=2), encoding="utf-8"
            )

    # -- helpers ------------------------------------------------------------

    def add_graph(self, graph: Graph) -> str:
        text = serialize_ntriples(graph)
        graph_id = hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
        with self._lock:
            self.graphs.setdefault(graph_id, graph)
        self.persist()
        return graph_id

    def get_graph(self, graph_id: str) -> Graph:
        graph = self.graphs.get(graph_id)
        if graph is None:
            raise ServiceError("not_found", f"unknown graph {graph_id!r}")
        return graph

    def get_session(self, session_id: str) -> DiagnosisSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise ServiceError("not_found", f"unknown session {session_id!r}")
        return session

    def session_lock(self, session_id: str) -> threading.Lock:
        with self._lock:
            return self._session_locks.setdefault(session_id, threading.Lock())


def create_app(data_dir: Optional[Path] = None, textgen: Optional[TextGenClient] = None) -> FastAPI:
    app = FastAPI(title="hepatodss", version="0.1.0")
    state = AppState(data_dir=data_dir, textgen=textgen or TextGenClient.from_env())
    app.state.engine_state = state

    @app.exception_handler(ServiceError)
    async def service_error_handler(request: Request, exc: ServiceError):
        body = {"code": exc.code, "message": exc.message}
        if exc.detail:
            body["detail"] = exc.detail
        return JSONResponse(status_code=_STATUS[exc.code], content=body)

    @app.exception_handler(DataError)
    async def data_error_handler(request: Request, exc: DataError):
        code = "bad_request"
        if isinstance(exc, (SessionStateError, PreconditionError)):
            code = "precondition_failed"
        elif isinstance(exc, ReportConflictError):
            code = "conflict"
        return JSONResponse(
            status_code=_STATUS[code], content={"code": code, "message": str(exc)}
        )

    @app.exception_handler(Exception)
    async def fallback_handler(request: Request, exc: Exception):
        return JSONResponse(
            status_code=500, content={"code": "internal", "message": "internal error"}
        )

    # -- datasets -----------------------------------------------------------

    @app.post("/datasets")
    async def post_dataset(request: Request):
        text = (await request.body()).decode("utf-8")
        if not text.strip():
            raise ServiceError("bad_request", "empty dataset body")
        graph, records = ingest_csv(text)
        graph_id = state.add_graph(graph)
        return {"graph_id": graph_id, "records": len(records), "triples": len(graph)}

    @app.get("/datasets")
    async def list_datasets():
        return {
            "graphs": [
                {"graph_id": gid, "triples": len(g)} for gid, g in sorted(state.graphs.items())
            ]
        }

    # -- rules --------------------------------------------------------------

    @app.post("/rules")
    async def post_rules(request: Request):
        payload = await _json_body(request)
        deployed = []
        if "text" in payload:
            text = payload["text"]
            if "name" in payload and "\n" not in text.strip():
                rule = parse_rule(text, default_name=payload["name"])
                ms = state.engine.deploy_rule(rule)
                deployed.append({"name": rule.name, "deploy_ms": ms})
            else:
                for rule in parse_rules(text):
                    ms = state.engine.deploy_rule(rule)
                    deployed.append({"name": rule.name, "deploy_ms": ms})
        else:
            raise ServiceError("bad_request", "body must carry a 'text' field with rule source")
        state.persist()
        return {"deployed": deployed}

    @app.get("/rules")
    async def get_rules():
        from .rules import serialize_rule

        return {
            "rules": [
                {"name": r.name, "text": serialize_rule(r)} for r in state.engine.active_rules()
            ]
        }

    @app.delete("/rules/{name}")
    async def delete_rule(name: str):
        removed = state.engine.undeploy_rule(name)
        if not removed:
            raise ServiceError("not_found", f"unknown rule {name!r}")
        state.persist()
        return {"removed": True, "name": name}

    # -- query / inference / metrics ----------------------------------------

    @app.post("/query")
    async def post_query(request: Request):
        payload = await _json_body(request)
        graph = state.get_graph(_require(payload, "graph_id"))
        query = parse_query(_require(payload, "query"))
        rows = sparql_evaluate(query, graph)
        from .sparql import _plain  # plain JSON values

        return {
            "vars": [v.name for v in query.select],
            "rows": [{v.name: _plain(row[v.name]) for v in query.select} for row in rows],
        }

    @app.post("/infer")
    async def post_infer(request: Request):
        from .rules import DEFAULT_NS, infer

        payload = await _json_body(request)
        graph = state.get_graph(_require(payload, "graph_id"))
        if "rules" in payload:
            rules = parse_rules(payload["rules"])
        else:
            rules = state.engine.active_rules()
        ns = payload.get("namespace", DEFAULT_NS)
        result = infer(graph, rules, ns=ns)
        return {
            "derived_count": len(result.derived),
            "derived_ntriples": serialize_ntriples(result.derived),
            "proofs": [
                {
                    "rule": step.rule,
                    "derived": _triple_text(step.derived),
                    "bindings": {k: _plain_term(v) for k, v in step.bindings},
                }
                for step in result.proofs
            ],
        }

    @app.get("/metrics/{graph_id}")
    async def get_metrics(graph_id: str):
        graph = state.get_graph(graph_id)
        return compute_metrics(state.schema, graph).to_dict()

    # -- streaming bench ----------------------------------------------------

    @app.post("/stream/bench")
    async def post_bench(request: Request):
        payload = await _json_body(request)
        graph = state.get_graph(_require(payload, "graph_id"))
        sweep = payload.get("sweep", "batch")
        runs = int(payload.get("runs", 5))
        records = stream_mod.records_from_graph(graph)
        bench = assets.bench_rules()
        if sweep == "batch":
            rows = stream_mod.bench_batch_sizes(records, bench[:5], runs=runs, ns=SCHEMA_NS)
        elif sweep == "rules":
            rows = stream_mod.bench_rule_counts(records, bench, runs=runs, ns=SCHEMA_NS)
        else:
            raise ServiceError("bad_request", f"unknown sweep {sweep!r} (use 'batch' or 'rules')")
        return {
            "rows": [
                {
                    "label": r.label,
                    "batch_size": r.batch_size,
                    "rule_count": r.rule_count,
                    "run_means_ms": list(r.run_means_ms),
                    "mean_ms": r.mean_ms,
                }
                for r in rows
            ],
            "csv": stream_mod.timing_csv(rows),
        }

    # -- sessions -----------------------------------------------------------

    @app.post("/sessions")
    async def post_session():
        session = DiagnosisSession(id=uuid.uuid4().hex[:12])
        with state._lock:
            state.sessions[session.id] = session
        state.persist()
        return {"id": session.id, "state": session.state}

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return state.get_session(session_id).to_dict()

    @app.post("/sessions/{session_id}/labs")
    async def post_labs(session_id: str, request: Request):
        payload = await _json_body(request)
        session = state.get_session(session_id)
        with state.session_lock(session_id):
            record = PatientRecord(
                uid=f"http://example.org/session/{session_id}",
                age=int(_require(payload, "age")),
                sex=int(_require(payload, "sex")),
                labs={k: float(v) for k, v in _require(payload, "labs").items()},
            )
            session.enter_labs(record)
            session.run_diagnosis(state.diagnostic_rules)
            if session.diagnosis != "Healthy":
                session.recommend()
            state.persist()
        return session.to_dict()

    @app.get("/sessions/{session_id}/diagnosis")
    async def get_diagnosis(session_id: str):
        session = state.get_session(session_id)
        if session.diagnosis is None:
            raise ServiceError("precondition_failed", "session has no diagnosis yet")
        return {
            "diagnosis": session.diagnosis,
            "fired_rules": [f.to_dict() for f in session.fired_rules],
            "recommended_tests": session.recommended,
            "state": session.state,
        }

    @app.post("/sessions/{session_id}/report")
    async def post_report(session_id: str, request: Request):
        text = (await request.body()).decode("utf-8")
        session = state.get_session(session_id)
        with state.session_lock(session_id):
            session.ingest_report(text)
            state.persist()
        return session.to_dict()

    @app.get("/sessions/{session_id}/plan")
    async def get_plan(session_id: str):
        session = state.get_session(session_id)
        with state.session_lock(session_id):
            plan = session.finalize_plan()
            state.persist()
        return {"state": session.state, "plan": plan.to_dict()}

    @app.get("/sessions/{session_id}/explanation")
    async def get_explanation(session_id: str):
        session = state.get_session(session_id)
        text = explain_session(session)
        enhanced = state.textgen.enhance(text) if state.textgen else None
        return {"explanation": text, "enhanced": enhanced}

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    return app


async def _json_body(request: Request) -> dict:
    try:
        payload = json.loads((await request.body()).decode("utf-8") or "{}")
    except json.JSONDecodeError as exc:
        raise ServiceError("bad_request", f"invalid JSON body: {exc}")
    if not isinstance(payload, dict):
        raise ServiceError("bad_request", "JSON body must be an object")
    return payload


def _require(payload: dict, key: str):
    if key not in payload:
        raise ServiceError("bad_request", f"missing field {key!r}")
    return payload[key]


def _triple_text(t) -> str:
    from .ntriples import serialize_triple

    return serialize_triple(t)


def _plain_term(term):
    from .terms import Iri

    return term.value if isinstance(term, Iri) else term.value


def serve(bind: str = "127.0.0.1:8000", data_dir: Optional[Path] = None):
    """Run the HTTP service (blocking)."""
    import uvicorn

    host, _, port = bind.partition(":")
    app = create_app(data_dir=data_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level="info")
