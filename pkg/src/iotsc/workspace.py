"""Workspace directory layout and the operations the CLI and HTTP API share.

A workspace holds scenario documents, per-session and per-collection
append-only event logs, and optional catalog/lexicon overrides::

    <root>/
      workspace.json          manifest
      scenarios/*.iotsc       registered artifacts
      sessions/S*.log         session event logs (JSONL)
      sessions/C*.log         collection event logs (JSONL)
      reports/                generated exports (never a source of truth)
      catalogs/               arrangements.csv / lexicons.txt overrides

Reports are always regenerated from the logs; per-session writes are
serialized through a lock per log so concurrent API calls cannot
interleave records.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .catalog import ArrangementCatalog, Checklist, load_arrangement_catalog, load_default
from .checks import Finding, run_checks
from .lexicons import DEFAULT_LEXICONS, Lexicons, load_lexicons
from .metrics import SessionMeasures
from .model import ScenarioDocument
from .parser import FILE_EXTENSION, ParseResult, parse_file
from .process import (
    ClassifiedCollection,
    EventLog,
    InspectionSession,
    MergedCollection,
    ProcessError,
    TechniqueTag,
    known_defects,
    replay_collection,
    replay_session,
)

FORMAT_VERSION = 1


class WorkspaceError(Exception):
    pass


@dataclass
class Manifest:
    name: str
    format_version: int = FORMAT_VERSION
    artifacts: dict[str, str] = field(default_factory=dict)  # id -> relative path
    inspectors: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({
            "name": self.name,
            "format_version": self.format_version,
            "artifacts": dict(sorted(self.artifacts.items())),
            "inspectors": sorted(self.inspectors),
        }, indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_json(text: str) -> "Manifest":
        raw = json.loads(text)
        return Manifest(name=raw["name"], format_version=raw["format_version"],
                        artifacts=dict(raw["artifacts"]), inspectors=list(raw["inspectors"]))


class Workspace:
    def __init__(self, root: Path, manifest: Manifest) -> None:
        self.root = root
        self.manifest = manifest
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # -- layout ----------------------------------------------------------

    @property
    def scenarios_dir(self) -> Path:
        return self.root / "scenarios"

    @property
    def sessions_dir(self) -> Path:
        return self.root / "sessions"

    @property
    def reports_dir(self) -> Path:
        return self.root / "reports"

    @property
    def catalogs_dir(self) -> Path:
        return self.root / "catalogs"

    @property
    def manifest_path(self) -> Path:
        return self.root / "workspace.json"

    def _lock_for(self, log_name: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(log_name, threading.Lock())

    def save_manifest(self) -> None:
        self.manifest_path.write_text(self.manifest.to_json(), encoding="utf-8")

    # -- catalogs ----------------------------------------------------------

    def load_catalogs(self) -> tuple[Checklist, ArrangementCatalog, Lexicons]:
        checklist, catalog = load_default()
        arrangements_file = self.catalogs_dir / "arrangements.csv"
        if arrangements_file.exists():
            catalog = load_arrangement_catalog(arrangements_file)
        lexicons = DEFAULT_LEXICONS
        lexicons_file = self.catalogs_dir / "lexicons.txt"
        if lexicons_file.exists():
            lexicons = load_lexicons(lexicons_file)
        return checklist, catalog, lexicons

    # -- scenarios ---------------------------------------------------------

    def scenario_ids(self) -> list[str]:
        return sorted(self.manifest.artifacts)

    def scenario_path(self, artifact_id: str) -> Path:
        rel = self.manifest.artifacts.get(artifact_id)
        if rel is None:
            raise WorkspaceError(f"unknown artifact {artifact_id!r}")
        return self.root / rel

    def load_scenario(self, artifact_id: str) -> ParseResult:
        return parse_file(self.scenario_path(artifact_id))

    def load_document(self, artifact_id: str) -> ScenarioDocument:
        result = self.load_scenario(artifact_id)
        if not result.ok:
            errors = "; ".join(str(d) for d in result.errors)
            raise WorkspaceError(f"artifact {artifact_id!r} does not parse: {errors}")
        return result.document

    def check_scenario(self, artifact_id: str) -> list[Finding]:
        checklist, catalog, lexicons = self.load_catalogs()
        return run_checks(self.load_document(artifact_id), checklist, catalog, lexicons)

    def register_scenario(self, path: Path) -> str:
        artifact_id = path.stem
        self.manifest.artifacts[artifact_id] = str(path.relative_to(self.root))
        self.save_manifest()
        return artifact_id

    # -- sessions ----------------------------------------------------------

    def _session_log(self, session_id: str) -> EventLog:
        return EventLog(self.sessions_dir / f"{session_id}.log")

    def _collection_log(self, collection_id: str) -> EventLog:
        return EventLog(self.sessions_dir / f"{collection_id}.log")

    def session_ids(self) -> list[str]:
        return sorted(p.stem for p in self.sessions_dir.glob("S*.log"))

    def collection_ids(self) -> list[str]:
        return sorted(p.stem for p in self.sessions_dir.glob("C*.log"))

    def next_session_id(self) -> str:
        return _next_id(self.session_ids(), "S")

    def next_collection_id(self) -> str:
        return _next_id(self.collection_ids(), "C")

    def load_session(self, session_id: str) -> InspectionSession:
        events = self._session_log(session_id).read()
        if not events:
            raise WorkspaceError(f"unknown session {session_id!r}")
        return replay_session(events)

    def load_collection(self, collection_id: str) -> MergedCollection | ClassifiedCollection:
        events = self._collection_log(collection_id).read()
        if not events:
            raise WorkspaceError(f"unknown collection {collection_id!r}")
        return replay_collection(events)

    def mutate_session(self, session_id: str, command) -> InspectionSession:
        """Run a command(session) -> (session, event-or-events) under the
        session's lock; events are appended only if the command succeeds."""
        log = self._session_log(session_id)
        with self._lock_for(f"S:{session_id}"):
            events = log.read()
            if not events:
                raise WorkspaceError(f"unknown session {session_id!r}")
            session = replay_session(events)
            session, produced = command(session)
            for event in produced if isinstance(produced, (list, tuple)) else [produced]:
                log.append(event)
            return session

    def create_session(self, artifact_id: str, inspector_id: str, technique: TechniqueTag,
                       trial: int = 1, ts: Optional[str] = None) -> InspectionSession:
        from .process import new_session

        if artifact_id not in self.manifest.artifacts:
            raise WorkspaceError(f"unknown artifact {artifact_id!r}")
        if inspector_id not in self.manifest.inspectors:
            self.manifest.inspectors.append(inspector_id)
            self.save_manifest()
        with self._lock_for("S:new"):
            session_id = self.next_session_id()
            session, event = new_session(session_id, artifact_id, inspector_id,
                                         technique, trial=trial, ts=ts)
            self._session_log(session_id).append(event)
        return session

    def create_collection(self, session_ids: list[str],
                          ts: Optional[str] = None) -> MergedCollection:
        from .process import collect

        sessions = [self.load_session(sid) for sid in session_ids]
        with self._lock_for("C:new"):
            collection_id = self.next_collection_id()
            collection, event = collect(sessions, collection_id, ts=ts)
            self._collection_log(collection_id).append(event)
        return collection

    def mutate_collection(self, collection_id: str, command):
        log = self._collection_log(collection_id)
        with self._lock_for(f"C:{collection_id}"):
            events = log.read()
            if not events:
                raise WorkspaceError(f"unknown collection {collection_id!r}")
            state = replay_collection(events)
            if isinstance(state, ClassifiedCollection):
                raise ProcessError(f"collection {collection_id} is already discriminated")
            state, produced = command(state)
            for event in produced if isinstance(produced, (list, tuple)) else [produced]:
                log.append(event)
            return state

    # -- metrics -----------------------------------------------------------

    def workspace_measures(self) -> list[SessionMeasures]:
        """Derive per-session measures from discriminated collections.

        Sessions appear once their artifact has a discriminated
        collection; the known-defect denominator for an artifact is the
        deduplicated union of real defects over all its collections.
        """
        classified = [c for c in (self.load_collection(cid) for cid in self.collection_ids())
                      if isinstance(c, ClassifiedCollection)]
        if not classified:
            return []
        known = known_defects(classified)
        defect_roots = {did for c in classified for did in c.real_defect_ids()}
        measures = []
        for c in classified:
            for session_id in c.session_ids:
                session = self.load_session(session_id)
                real = sum(
                    1 for d in c.discrepancies
                    if d.session_id == session_id
                    and (d.duplicate_of or d.discrepancy_id) in defect_roots)
                if session.time_hours == 0 and not session.discrepancies:
                    continue
                measures.append(SessionMeasures(
                    inspector_id=session.inspector_id,
                    technique=session.technique,
                    trial=session.trial,
                    discrepancies=len(session.discrepancies),
                    real_defects=real,
                    time_hours=session.time_hours,
                    known_defects=known.for_artifact(c.artifact_id),
                ))
        return measures


def _next_id(existing: list[str], prefix: str) -> str:
    best = 0
    for sid in existing:
        m = re.match(rf"^{prefix}(\d+)$", sid)
        if m:
            best = max(best, int(m.group(1)))
    return f"{prefix}{best + 1:03d}"


def init_workspace(path: str | Path, name: str) -> Workspace:
    """Create the directory skeleton and copy the bundled example fixtures.

    Refuses to touch a non-empty directory.
    """
    root = Path(path)
    if root.exists() and any(root.iterdir()):
        raise WorkspaceError(f"refusing to initialize non-empty directory {root}")
    root.mkdir(parents=True, exist_ok=True)
    manifest = Manifest(name=name)
    workspace = Workspace(root, manifest)
    for sub in (workspace.scenarios_dir, workspace.sessions_dir,
                workspace.reports_dir, workspace.catalogs_dir):
        sub.mkdir()
    data = resources.files("iotsc").joinpath("data")
    for fixture in ("greenhouse", "smart-farm"):
        target = workspace.scenarios_dir / f"{fixture}{FILE_EXTENSION}"
        target.write_text(
            data.joinpath(f"{fixture}{FILE_EXTENSION}").read_text(encoding="utf-8"),
            encoding="utf-8")
        manifest.artifacts[fixture] = str(target.relative_to(root))
    (workspace.catalogs_dir / "arrangements.csv").write_text(
        data.joinpath("arrangements.csv").read_text(encoding="utf-8"), encoding="utf-8")
    workspace.save_manifest()
    return workspace


def open_workspace(path: str | Path) -> Workspace:
    root = Path(path)
    manifest_path = root / "workspace.json"
    if not manifest_path.exists():
        raise WorkspaceError(f"{root} is not a workspace (no workspace.json)")
    manifest = Manifest.from_json(manifest_path.read_text(encoding="utf-8"))
    if manifest.format_version != FORMAT_VERSION:
        raise WorkspaceError(
            f"workspace format version {manifest.format_version} is not supported "
            f"(tool supports {FORMAT_VERSION})")
    return Workspace(root, manifest)
