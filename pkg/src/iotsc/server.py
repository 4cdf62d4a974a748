"""Versioned HTTP API over a workspace; the browser client's only backend.

All mutations go through the per-session/per-collection event logs, so a
crash between requests loses at most the in-flight event. Body shapes
are documented in SCHEMAS.md.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import process
from .catalog import DefectType
from .metrics import aggregate_report, format_3dp, report_to_csv
from .model import (
    ActorDecl,
    Flow,
    Scenario,
    ScenarioDocument,
    SourceLocation,
)
from .process import (
    Answer,
    Classification,
    Discrepancy,
    DiscrepancyOrigin,
    Phase,
    PhaseError,
    ProcessError,
    StepRef,
    TechniqueTag,
)
from .workspace import Workspace, WorkspaceError


class SessionCreate(BaseModel):
    artifact_id: str
    inspector_id: str
    technique: str = Field(pattern="^(ad-hoc|checklist)$")
    trial: int = 1


class TimerRequest(BaseModel):
    at: Optional[str] = None


class AnswerBody(BaseModel):
    answer: str = Field(pattern="^(yes|no|not_applicable)$")


class DiscrepancyCreate(BaseModel):
    scenario_id: str
    description: str
    defect_type: str
    origin: str = "human"
    question_id: Optional[str] = None
    line: Optional[int] = None
    column: Optional[int] = None
    flow_label: Optional[str] = None
    step_number: Optional[int] = None


class CollectionCreate(BaseModel):
    session_ids: list[str]


class DuplicateLink(BaseModel):
    duplicate_id: str
    target_id: str


class DiscriminateBody(BaseModel):
    decisions: dict[str, str]


def create_app(workspace: Workspace, ui_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="iotsc", version="1")

    def fail(exc: Exception) -> HTTPException:
        if isinstance(exc, PhaseError):
            return HTTPException(status_code=409, detail=str(exc))
        if isinstance(exc, (ProcessError, ValueError)):
            return HTTPException(status_code=400, detail=str(exc))
        if isinstance(exc, WorkspaceError):
            message = str(exc)
            status = 404 if "unknown" in message else 400
            return HTTPException(status_code=status, detail=message)
        return HTTPException(status_code=500, detail=str(exc))

    # -- scenarios -------------------------------------------------------

    @app.get("/v1/scenarios")
    def list_scenarios() -> list[dict]:
        out = []
        for artifact_id in workspace.scenario_ids():
            result = workspace.load_scenario(artifact_id)
            out.append({
                "id": artifact_id,
                "path": str(workspace.scenario_path(artifact_id)),
                "ok": result.ok,
                "scenario_count": len(result.document.scenarios) if result.ok else 0,
            })
        return out

    @app.get("/v1/scenarios/{artifact_id}")
    def get_scenario(artifact_id: str) -> dict:
        try:
            document = workspace.load_document(artifact_id)
        except WorkspaceError as exc:
            raise fail(exc)
        return {
            "id": artifact_id,
            "document": document_to_dict(document),
            "source": workspace.scenario_path(artifact_id).read_text(encoding="utf-8"),
        }

    @app.post("/v1/scenarios/{artifact_id}/check")
    def check_scenario(artifact_id: str) -> list[dict]:
        try:
            return [f.to_dict() for f in workspace.check_scenario(artifact_id)]
        except WorkspaceError as exc:
            raise fail(exc)

    # -- checklist ---------------------------------------------------------

    @app.get("/v1/checklist")
    def get_checklist() -> dict:
        checklist, catalog, _ = workspace.load_catalogs()
        return {
            "version": checklist.version,
            "questions": [{
                "id": q.question_id,
                "part": q.part.value,
                "text": q.text,
                "hint": q.hint,
                "facets": sorted(f.value for f in q.facets),
                "automation": q.automation.value,
            } for q in checklist.questions],
            "arrangements": [{
                "id": e.arrangement_id,
                "name": e.name,
                "required_roles": sorted(r.value for r in e.required_roles),
            } for e in catalog.entries],
        }

    # -- sessions ----------------------------------------------------------

    @app.get("/v1/sessions")
    def list_sessions() -> list[dict]:
        return [session_to_dict(workspace.load_session(sid))
                for sid in workspace.session_ids()]

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        try:
            return session_to_dict(workspace.load_session(session_id))
        except WorkspaceError as exc:
            raise fail(exc)

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: SessionCreate) -> dict:
        try:
            session = workspace.create_session(
                body.artifact_id, body.inspector_id,
                TechniqueTag(body.technique), trial=body.trial)
        except (WorkspaceError, ProcessError, ValueError) as exc:
            raise fail(exc)
        return session_to_dict(session)

    @app.post("/v1/sessions/{session_id}/start")
    def start_session(session_id: str, body: Optional[TimerRequest] = None) -> dict:
        at = body.at if body else None

        def command(session):
            events = []
            if session.phase is Phase.PLANNING:
                session, advanced = process.advance_phase(session, Phase.DETECTION, ts=at)
                events.append(advanced)
            session, started = process.start_timer(session, at=at)
            events.append(started)
            return session, events

        try:
            return session_to_dict(workspace.mutate_session(session_id, command))
        except (WorkspaceError, ProcessError, ValueError) as exc:
            raise fail(exc)

    @app.post("/v1/sessions/{session_id}/stop")
    def stop_session(session_id: str, body: Optional[TimerRequest] = None) -> dict:
        at = body.at if body else None
        try:
            return session_to_dict(workspace.mutate_session(
                session_id, lambda s: process.stop_timer(s, at=at)))
        except (WorkspaceError, ProcessError, ValueError) as exc:
            raise fail(exc)

    @app.post("/v1/sessions/{session_id}/discrepancies", status_code=201)
    def add_discrepancy(session_id: str, body: DiscrepancyCreate) -> dict:
        location: SourceLocation | StepRef
        if body.step_number is not None:
            location = StepRef(flow_label=body.flow_label or "", step_number=body.step_number)
        elif body.line is not None:
            location = SourceLocation(line=body.line, column=body.column or 1)
        else:
            raise HTTPException(status_code=400,
                                detail="a discrepancy needs a line or a step reference")
        try:
            entry = Discrepancy(
                discrepancy_id="pending", session_id=session_id,
                scenario_id=body.scenario_id, location=location,
                description=body.description,
                defect_type=DefectType(body.defect_type),
                origin=DiscrepancyOrigin(body.origin),
                question_id=body.question_id)
            session = workspace.mutate_session(
                session_id, lambda s: process.record_discrepancy(s, entry))
        except (WorkspaceError, ProcessError, ValueError) as exc:
            raise fail(exc)
        return {"discrepancy_id": session.discrepancies[-1].discrepancy_id,
                "session": session_to_dict(session)}

    @app.put("/v1/sessions/{session_id}/answers/{question_id}")
    def put_answer(session_id: str, question_id: str, body: AnswerBody) -> dict:
        try:
            session = workspace.mutate_session(
                session_id,
                lambda s: process.record_answer(s, question_id, Answer(body.answer)))
        except (WorkspaceError, ProcessError, ValueError) as exc:
            raise fail(exc)
        return session_to_dict(session)

    # -- collections -------------------------------------------------------

    @app.get("/v1/collections")
    def list_collections() -> list[dict]:
        return [collection_to_dict(workspace.load_collection(cid))
                for cid in workspace.collection_ids()]

    @app.get("/v1/collections/{collection_id}")
    def get_collection(collection_id: str) -> dict:
        try:
            return collection_to_dict(workspace.load_collection(collection_id))
        except WorkspaceError as exc:
            raise fail(exc)

    @app.post("/v1/collections", status_code=201)
    def create_collection(body: CollectionCreate) -> dict:
        def advance(session):
            events = []
            if session.timer_running:
                session, stopped = process.stop_timer(session)
                events.append(stopped)
            session, advanced = process.advance_phase(session, Phase.COLLECTION)
            events.append(advanced)
            return session, events

        try:
            for sid in body.session_ids:
                session = workspace.load_session(sid)
                if session.phase is Phase.DETECTION:
                    workspace.mutate_session(sid, advance)
            collection = workspace.create_collection(body.session_ids)
        except (WorkspaceError, ProcessError, ValueError) as exc:
            raise fail(exc)
        return collection_to_dict(collection)

    @app.post("/v1/collections/{collection_id}/duplicates")
    def mark_duplicate(collection_id: str, body: DuplicateLink) -> dict:
        try:
            collection = workspace.mutate_collection(
                collection_id,
                lambda c: process.mark_duplicate(c, body.duplicate_id, body.target_id))
        except (WorkspaceError, ProcessError, ValueError) as exc:
            raise fail(exc)
        return collection_to_dict(collection)

    @app.post("/v1/collections/{collection_id}/discriminate")
    def discriminate(collection_id: str, body: DiscriminateBody) -> dict:
        decisions = {k: Classification(v) for k, v in body.decisions.items()}

        def command(collection):
            classified, event = process.discriminate(collection, decisions)
            for sid in classified.session_ids:
                session = workspace.load_session(sid)
                if session.phase is Phase.COLLECTION:
                    workspace.mutate_session(
                        sid, lambda s: process.advance_phase(s, Phase.DISCRIMINATION))
            return classified, event

        try:
            classified = workspace.mutate_collection(collection_id, command)
        except (WorkspaceError, ProcessError, ValueError) as exc:
            raise fail(exc)
        return collection_to_dict(classified)

    # -- reports -----------------------------------------------------------

    @app.get("/v1/reports/metrics")
    def metrics_report() -> dict:
        report = aggregate_report(workspace.workspace_measures())
        return report_to_dict(report)

    @app.get("/v1/reports/metrics.csv", response_class=PlainTextResponse)
    def metrics_csv() -> str:
        return report_to_csv(aggregate_report(workspace.workspace_measures()))

    if ui_dir is not None:
        # mounted last so /v1 routes keep precedence; serves index.html at /
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


# --- serializers ---------------------------------------------------------

def document_to_dict(doc: ScenarioDocument) -> dict:
    return {
        "source_name": doc.source_name,
        "header": {
            "goal": doc.header.system_goal,
            "domain": doc.header.system_domain,
            "actors": [actor_to_dict(a) for a in doc.header.actors],
            "data_types": list(doc.header.collected_data_types),
        },
        "scenarios": [scenario_to_dict(s) for s in doc.scenarios],
    }


def actor_to_dict(decl: ActorDecl) -> dict:
    return {"name": decl.name, "role": decl.role.value, "description": decl.description}


def flow_to_dict(flow: Flow) -> dict:
    return {
        "kind": flow.kind.value,
        "label": flow.label,
        "branch_origin": flow.branch_origin,
        "steps": [{"number": s.number, "text": s.text,
                   "line": s.location.line if s.location else None} for s in flow.steps],
    }


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "id": scenario.scenario_id,
        "title": scenario.title,
        "arrangement": None if scenario.arrangement is None else {
            "id": scenario.arrangement.arrangement_id,
            "name": scenario.arrangement.arrangement_name,
        },
        "actors": [actor_to_dict(a) for a in scenario.actors],
        "main_flow": flow_to_dict(scenario.main_flow),
        "alternative_flows": [flow_to_dict(f) for f in scenario.alternative_flows],
        "exception_flows": [flow_to_dict(f) for f in scenario.exception_flows],
    }


def session_to_dict(session) -> dict:
    return {
        "session_id": session.session_id,
        "artifact_id": session.artifact_id,
        "inspector_id": session.inspector_id,
        "technique": session.technique.value,
        "trial": session.trial,
        "phase": session.phase.value,
        "detection_start": session.detection_start,
        "detection_end": session.detection_end,
        "timer_running": session.timer_running,
        "elapsed_seconds": session.elapsed_us // 1_000_000,
        "discrepancies": [d.to_payload() for d in session.discrepancies],
        "answers": {qid: a.value for qid, a in sorted(session.checklist_answers.items())},
    }


def collection_to_dict(collection) -> dict:
    out = {
        "collection_id": collection.collection_id,
        "artifact_id": collection.artifact_id,
        "session_ids": list(collection.session_ids),
        "discrepancies": [d.to_payload() for d in collection.discrepancies],
        "total": collection.total_count,
        "distinct": collection.distinct_count,
        "discriminated": hasattr(collection, "real_defect_count"),
    }
    if out["discriminated"]:
        out["real_defects"] = collection.real_defect_count
    return out


def report_to_dict(report) -> dict:
    return {
        "rows": [{
            "trial": r.trial,
            "technique": r.technique.value,
            "inspectors": r.inspectors,
            "total_discrepancies": r.total_discrepancies,
            "total_defects": r.total_defects,
            "mean_time_hours": format_3dp(r.mean_time_hours),
            "mean_cost_efficiency": format_3dp(r.mean_cost_efficiency),
            "mean_efficiency": format_3dp(r.mean_efficiency),
            "mean_effectiveness": format_3dp(r.mean_effectiveness),
        } for r in report.rows],
        "per_inspector": [{
            "trial": m.trial,
            "technique": m.technique.value,
            "inspector": m.inspector_id,
            "discrepancies": m.discrepancies,
            "real_defects": m.real_defects,
            "time_hours": format_3dp(m.time_hours),
            "cost_efficiency": format_3dp(m.cost_efficiency),
            "efficiency": format_3dp(m.efficiency),
            "effectiveness": format_3dp(m.effectiveness),
        } for m in report.per_inspector],
        "csv": report_to_csv(report),
    }
