"""HTTP service driving the extraction workflow session by session.

Each session walks new -> gor_built -> classified -> configured ->
extracting -> done | failed; posting to an earlier step resets everything
downstream. Every endpoint is a thin wrapper over the library, so service
results are byte-identical to direct calls with the same inputs.
"""

from __future__ import annotations

import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .catalog import Catalog, KeyFilter, load_catalog, scan_table
from .classify import DEFAULT_RULES, ClassificationRules, DetailLink, TableCategory
from .errors import OcelforgeError
from .ocel import (
    OcelLog,
    convergence_stats,
    divergence_stats,
    flat_to_csv_bytes,
    flatten,
    serialize_json,
)
from .pipeline import classify_to_fixpoint, load_lookups, run_extraction
from .plan import (
    DEFAULT_OBJECT_BLACKLIST,
    DEFAULT_TIMESTAMP_PRIORITY,
    ExtractionPlan,
    SemanticChangeRule,
    key_field_union,
    plan_to_doc,
    validate_plan,
)
from .relations import GraphOfRelations, build_gor, extend_gor, gor_to_doc
from .synth import P2P_TABLES

DEFAULT_PORT = 5000
VALUES_CAP = 200

_STATE_ORDER = {
    "new": 0,
    "gor_built": 1,
    "classified": 2,
    "configured": 3,
    "extracting": 4,
    "done": 5,
    "failed": 5,
}

PRESETS = ({"name": "P2P", "master": "EKKO", "tables": list(P2P_TABLES)},)


def default_port() -> int:
    return int(os.environ.get("OCELFORGE_PORT", str(DEFAULT_PORT)))


@dataclass
class Session:
    id: str
    snapshot: Path
    catalog: Catalog
    state: str = "new"
    gor: Optional[GraphOfRelations] = None
    categories: Optional[dict[str, TableCategory]] = None
    detail_links: frozenset[DetailLink] = frozenset()
    rules: ClassificationRules = DEFAULT_RULES
    plan: Optional[ExtractionPlan] = None
    log: Optional[OcelLog] = None
    log_bytes: Optional[bytes] = None
    diagnostics: dict = field(default_factory=dict)
    progress: dict = field(default_factory=dict)
    error: Optional[str] = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    def at_least(self, state: str) -> bool:
        return _STATE_ORDER[self.state] >= _STATE_ORDER[state]

    def to_doc(self) -> dict:
        doc = {
            "id": self.id,
            "snapshot": str(self.snapshot),
            "state": self.state,
            "progress": dict(self.progress),
            "diagnostics": dict(self.diagnostics),
        }
        if self.gor is not None:
            doc["gor"] = gor_to_doc(self.gor, self.catalog, self.categories)
        if self.categories is not None:
            doc["categories"] = _categories_doc(self.categories)
            doc["detail_links"] = _links_doc(self.detail_links)
        if self.plan is not None:
            doc["plan"] = plan_to_doc(self.plan)
        if self.error is not None:
            doc["error"] = self.error
        return doc


def _categories_doc(categories: dict[str, TableCategory]) -> dict:
    return {
        table: {"value": cat.value, "evidence": list(cat.evidence)}
        for table, cat in sorted(categories.items())
    }


def _links_doc(links: frozenset[DetailLink]) -> list[dict]:
    return [
        {
            "detail_table": link.detail_table,
            "master_table": link.master_table,
            "shared_key_fields": list(link.shared_key_fields),
        }
        for link in sorted(links, key=lambda l: (l.detail_table, l.master_table))
    ]


class CreateSessionBody(BaseModel):
    snapshot: str


class GorBody(BaseModel):
    master: str
    threshold: int = 0
    max_distance: int = 3


class ExtendBody(BaseModel):
    add: list[str]


class ClassifyBody(BaseModel):
    overrides: dict[str, str] = {}


class FilterBody(BaseModel):
    field: str
    values: list[str]


class RuleBody(BaseModel):
    table: str
    field: str
    predicate: str
    activity_name: str


class PlanBody(BaseModel):
    filters: list[FilterBody] = []
    change_strategy: str = "tcode"
    semantic_rules: list[RuleBody] = []
    timestamp_priority: Optional[list[list[str]]] = None
    object_blacklist: Optional[list[str]] = None
    transitive_links: bool = False


class ExtractBody(BaseModel):
    jobs: int = 1


class FlattenBody(BaseModel):
    case_type: str


def _conflict(message: str) -> HTTPException:
    return HTTPException(status_code=409, detail={"code": "invalid_state", "message": message})


def _invalid(exc: Exception) -> HTTPException:
    return HTTPException(
        status_code=422,
        detail={"code": type(exc).__name__, "message": str(exc)},
    )


def create_app(ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="ocelforge")
    sessions: dict[str, Session] = {}

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(
                status_code=404,
                detail={"code": "unknown_session", "message": session_id},
            )
        return session

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        snapshot = Path(body.snapshot)
        try:
            catalog = load_catalog(snapshot)
        except (OcelforgeError, OSError) as exc:
            raise _invalid(exc)
        session = Session(id=uuid.uuid4().hex, snapshot=snapshot, catalog=catalog)
        sessions[session.id] = session
        return {
            "id": session.id,
            "state": session.state,
            "snapshot": str(snapshot),
            "tables": len(catalog.tables),
        }

    @app.get("/sessions/{session_id}")
    def show_session(session_id: str):
        return get_session(session_id).to_doc()

    @app.get("/sessions/{session_id}/tables")
    def list_tables(session_id: str):
        session = get_session(session_id)
        in_gor = session.gor.nodes if session.gor is not None else frozenset()
        return {
            "tables": [
                {
                    "name": name,
                    "row_count": schema.row_count,
                    "key": list(schema.primary_key),
                    "in_gor": name in in_gor,
                }
                for name, schema in sorted(session.catalog.tables.items())
            ]
        }

    @app.get("/sessions/{session_id}/tables/presets")
    def list_presets(session_id: str):
        session = get_session(session_id)
        presets = []
        for preset in PRESETS:
            available = [t for t in preset["tables"] if t in session.catalog.tables]
            presets.append({**preset, "available": available})
        return {"presets": presets}

    @app.post("/sessions/{session_id}/gor")
    def post_gor(session_id: str, body: GorBody):
        session = get_session(session_id)
        with session.lock:
            if session.state == "extracting":
                raise _conflict("extraction in progress")
            try:
                gor = build_gor(
                    session.catalog,
                    body.master,
                    row_threshold=body.threshold,
                    max_distance=body.max_distance,
                )
            except OcelforgeError as exc:
                raise _invalid(exc)
            session.gor = gor
            session.categories = None
            session.detail_links = frozenset()
            session.plan = None
            session.log = None
            session.log_bytes = None
            session.error = None
            session.state = "gor_built"
            return gor_to_doc(gor, session.catalog)

    @app.post("/sessions/{session_id}/gor/extend")
    def post_gor_extend(session_id: str, body: ExtendBody):
        session = get_session(session_id)
        with session.lock:
            if session.state == "extracting":
                raise _conflict("extraction in progress")
            if not session.at_least("gor_built") or session.gor is None:
                raise _conflict("build the graph first")
            try:
                gor = extend_gor(session.gor, session.catalog, body.add)
            except OcelforgeError as exc:
                raise _invalid(exc)
            session.gor = gor
            session.categories = None
            session.detail_links = frozenset()
            session.plan = None
            session.log = None
            session.log_bytes = None
            session.state = "gor_built"
            return gor_to_doc(gor, session.catalog)

    @app.post("/sessions/{session_id}/classify")
    def post_classify(session_id: str, body: ClassifyBody):
        session = get_session(session_id)
        with session.lock:
            if session.state == "extracting":
                raise _conflict("extraction in progress")
            if not session.at_least("gor_built") or session.gor is None:
                raise _conflict("build the graph first")
            rules = DEFAULT_RULES.with_overrides(body.overrides)
            try:
                gor, categories, links = classify_to_fixpoint(
                    session.catalog, session.gor, rules
                )
            except OcelforgeError as exc:
                raise _invalid(exc)
            session.rules = rules
            session.gor = gor
            session.categories = categories
            session.detail_links = links
            session.plan = None
            session.log = None
            session.log_bytes = None
            session.state = "classified"
            return {
                "gor": gor_to_doc(gor, session.catalog, categories),
                "categories": _categories_doc(categories),
                "detail_links": _links_doc(links),
            }

    @app.get("/sessions/{session_id}/keys")
    def get_keys(session_id: str):
        session = get_session(session_id)
        if not session.at_least("gor_built") or session.gor is None:
            raise _conflict("build the graph first")
        union = key_field_union(session.catalog, session.gor)
        return {"fields": [{"field": f, "tables": tables} for f, tables in union]}

    @app.get("/sessions/{session_id}/keys/{field}/values")
    def get_key_values(session_id: str, field: str):
        session = get_session(session_id)
        if not session.at_least("gor_built") or session.gor is None:
            raise _conflict("build the graph first")
        union = dict(key_field_union(session.catalog, session.gor))
        if field not in union:
            raise _invalid(OcelforgeError(f"{field} is not a key field here"))
        values: set[str] = set()
        for table in union[field]:
            for row in scan_table(session.catalog, table):
                values.add(row[field])
        ordered = sorted(values)
        return {
            "field": field,
            "values": ordered[:VALUES_CAP],
            "truncated": len(ordered) > VALUES_CAP,
        }

    @app.post("/sessions/{session_id}/plan")
    def post_plan(session_id: str, body: PlanBody):
        session = get_session(session_id)
        with session.lock:
            if session.state == "extracting":
                raise _conflict("extraction in progress")
            if not session.at_least("classified") or session.categories is None:
                raise _conflict("classify the tables first")
            try:
                semantic_rules = tuple(
                    SemanticChangeRule(
                        table=r.table,
                        field=r.field,
                        predicate=r.predicate,
                        activity_name=r.activity_name,
                    )
                    for r in body.semantic_rules
                )
                plan = ExtractionPlan(
                    gor=session.gor,
                    categories=session.categories,
                    detail_links=session.detail_links,
                    filters=tuple(
                        KeyFilter(field=f.field, allowed_values=f.values)
                        for f in body.filters
                    ),
                    change_strategy=body.change_strategy,
                    semantic_rules=semantic_rules,
                    timestamp_priority=(
                        tuple(tuple(entry) for entry in body.timestamp_priority)
                        if body.timestamp_priority is not None
                        else DEFAULT_TIMESTAMP_PRIORITY
                    ),
                    object_blacklist=(
                        frozenset(body.object_blacklist)
                        if body.object_blacklist is not None
                        else DEFAULT_OBJECT_BLACKLIST
                    ),
                    transitive_links=body.transitive_links,
                )
                validate_plan(plan, session.catalog)
            except OcelforgeError as exc:
                raise _invalid(exc)
            session.plan = plan
            session.log = None
            session.log_bytes = None
            session.state = "configured"
            return plan_to_doc(plan)

    def _extract(session: Session, jobs: int) -> None:
        def hook(table: str, done: int, total: int, events: int) -> None:
            session.progress = {
                "tables_done": done,
                "tables_total": total,
                "events_emitted": events,
            }

        try:
            tcodes, doctypes = load_lookups(session.snapshot)
            log, diag = run_extraction(
                session.catalog,
                session.plan,
                tcodes,
                doctypes,
                session.rules,
                jobs=jobs,
                progress=hook,
            )
            data = serialize_json(log)
            with session.lock:
                session.log = log
                session.log_bytes = data
                session.diagnostics = diag.to_doc()
                session.state = "done"
        except Exception as exc:
            with session.lock:
                session.error = str(exc)
                session.state = "failed"

    @app.post("/sessions/{session_id}/extract", status_code=202)
    def post_extract(session_id: str, body: ExtractBody | None = None):
        session = get_session(session_id)
        jobs = body.jobs if body is not None else 1
        with session.lock:
            if session.state == "extracting":
                raise _conflict("extraction already running")
            if session.plan is None:
                raise _conflict("configure a plan first")
            session.state = "extracting"
            session.error = None
            session.progress = {
                "tables_done": 0,
                "tables_total": len(session.plan.gor.nodes),
                "events_emitted": 0,
            }
        worker = threading.Thread(target=_extract, args=(session, jobs), daemon=True)
        worker.start()
        return {"state": "extracting"}

    @app.get("/sessions/{session_id}/extract/status")
    def extract_status(session_id: str):
        session = get_session(session_id)
        doc = {"state": session.state, "progress": dict(session.progress)}
        if session.error is not None:
            doc["error"] = session.error
        if session.state == "done":
            doc["diagnostics"] = dict(session.diagnostics)
        return doc

    @app.get("/sessions/{session_id}/ocel")
    def get_ocel(session_id: str):
        session = get_session(session_id)
        if session.state != "done" or session.log_bytes is None:
            raise _conflict("no completed extraction")
        return Response(content=session.log_bytes, media_type="application/json")

    @app.post("/sessions/{session_id}/flatten")
    def post_flatten(session_id: str, body: FlattenBody):
        session = get_session(session_id)
        if session.state != "done" or session.log is None:
            raise _conflict("no completed extraction")
        try:
            flat = flatten(session.log, body.case_type)
            convergence = convergence_stats(session.log, body.case_type)
        except OcelforgeError as exc:
            raise _invalid(exc)
        divergence = divergence_stats(flat)
        return {
            "case_type": body.case_type,
            "cases": len(flat.cases),
            "dropped_events": flat.dropped_events,
            "convergence": convergence.to_doc(),
            "divergence": divergence.to_doc(),
            "csv": flat_to_csv_bytes(flat).decode("utf-8"),
        }

    if ui_dir is None:
        ui_dir = os.environ.get("OCELFORGE_UI_DIR")
    if ui_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        if bundled.is_dir():
            ui_dir = bundled
    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:

        @app.get("/")
        def index():
            return {"service": "ocelforge", "endpoints": "/sessions"}

    return app


def serve(
    host: str = "127.0.0.1",
    port: int | None = None,
    ui_dir: str | Path | None = None,
) -> None:
    import uvicorn

    uvicorn.run(create_app(ui_dir), host=host, port=port or default_port())
