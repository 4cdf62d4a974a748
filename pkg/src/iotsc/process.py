"""Inspection session bookkeeping: planning, detection, collection,
discrimination, and known-defect aggregation.

Sessions are event-sourced: every mutation validates against the current
state, produces a self-describing event record, and the new state is the
fold of all events. Replaying a session's log therefore reproduces the
exact live state, which is the crash-safety contract of the on-disk
append-only logs (see SCHEMAS.md for the record fields).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .catalog import DefectType
from .model import SourceLocation


class ProcessError(Exception):
    """Base for inspection-process violations."""


class PhaseError(ProcessError):
    pass


class PlanningError(ProcessError):
    pass


class CollectionError(ProcessError):
    pass


class DiscriminationError(ProcessError):
    pass


class Phase(Enum):
    PLANNING = "planning"
    DETECTION = "detection"
    COLLECTION = "collection"
    DISCRIMINATION = "discrimination"
    FOLLOW_UP = "follow_up"


_PHASE_ORDER = tuple(Phase)


def phase_index(phase: Phase) -> int:
    return _PHASE_ORDER.index(phase)


class TechniqueTag(Enum):
    AD_HOC = "ad-hoc"
    CHECKLIST = "checklist"


class Answer(Enum):
    YES = "yes"
    NO = "no"
    NOT_APPLICABLE = "not_applicable"


class DiscrepancyOrigin(Enum):
    HUMAN = "human"
    AUTO_CHECK = "auto_check"


class Classification(Enum):
    DEFECT = "defect"
    FALSE_POSITIVE = "false_positive"


@dataclass(frozen=True)
class StepRef:
    """Reference to a step by flow label ('' = main flow) and number."""

    flow_label: str
    step_number: int


@dataclass(frozen=True)
class Discrepancy:
    discrepancy_id: str
    session_id: str
    scenario_id: str
    location: SourceLocation | StepRef
    description: str
    defect_type: DefectType
    origin: DiscrepancyOrigin = DiscrepancyOrigin.HUMAN
    question_id: Optional[str] = None
    duplicate_of: Optional[str] = None
    classification: Optional[Classification] = None

    def __post_init__(self) -> None:
        if self.question_id is not None and not re.match(r"^Q(0[1-9]|[12]\d|3[012])$", self.question_id):
            raise ValueError(f"bad question id {self.question_id!r}")
        if not self.description.strip():
            raise ValueError("discrepancy description must be non-empty")

    def to_payload(self) -> dict:
        if isinstance(self.location, StepRef):
            loc = {"kind": "step", "flow_label": self.location.flow_label,
                   "step_number": self.location.step_number}
        else:
            loc = {"kind": "line", "line": self.location.line, "column": self.location.column}
        return {
            "discrepancy_id": self.discrepancy_id,
            "session_id": self.session_id,
            "scenario_id": self.scenario_id,
            "location": loc,
            "description": self.description,
            "defect_type": self.defect_type.value,
            "origin": self.origin.value,
            "question_id": self.question_id,
            "duplicate_of": self.duplicate_of,
            "classification": self.classification.value if self.classification else None,
        }

    @staticmethod
    def from_payload(payload: Mapping) -> "Discrepancy":
        loc = payload["location"]
        location: SourceLocation | StepRef
        if loc["kind"] == "step":
            location = StepRef(flow_label=loc["flow_label"], step_number=loc["step_number"])
        else:
            location = SourceLocation(line=loc["line"], column=loc.get("column", 1))
        return Discrepancy(
            discrepancy_id=payload["discrepancy_id"],
            session_id=payload["session_id"],
            scenario_id=payload["scenario_id"],
            location=location,
            description=payload["description"],
            defect_type=DefectType(payload["defect_type"]),
            origin=DiscrepancyOrigin(payload["origin"]),
            question_id=payload.get("question_id"),
            duplicate_of=payload.get("duplicate_of"),
            classification=Classification(payload["classification"]) if payload.get("classification") else None,
        )


@dataclass(frozen=True)
class Event:
    """One append-only log record."""

    seq: int
    ts: str  # ISO-8601
    kind: str
    payload: dict

    def to_json(self) -> str:
        return json.dumps({"seq": self.seq, "ts": self.ts, "kind": self.kind,
                           "payload": self.payload}, sort_keys=True)

    @staticmethod
    def from_json(line: str) -> "Event":
        raw = json.loads(line)
        return Event(seq=raw["seq"], ts=raw["ts"], kind=raw["kind"], payload=raw["payload"])


def now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class InspectionSession:
    session_id: str
    artifact_id: str
    inspector_id: str
    technique: TechniqueTag
    trial: int = 1
    phase: Phase = Phase.PLANNING
    detection_start: Optional[str] = None
    detection_end: Optional[str] = None
    timer_running_since: Optional[str] = None
    elapsed_us: int = 0
    discrepancies: tuple[Discrepancy, ...] = ()
    checklist_answers: Mapping[str, Answer] = field(default_factory=dict)
    next_seq: int = 0

    @property
    def time_hours(self) -> Fraction:
        return Fraction(self.elapsed_us, 3_600_000_000)

    @property
    def timer_running(self) -> bool:
        return self.timer_running_since is not None


def _parse_ts(value: str) -> datetime:
    return datetime.fromisoformat(value)


def _fresh_event(session: Optional[InspectionSession], kind: str, payload: dict,
                 ts: Optional[str]) -> Event:
    seq = 1 if session is None else session.next_seq + 1
    return Event(seq=seq, ts=ts or now_iso(), kind=kind, payload=payload)


def new_session(session_id: str, artifact_id: str, inspector_id: str,
                technique: TechniqueTag, trial: int = 1,
                ts: Optional[str] = None) -> tuple[InspectionSession, Event]:
    event = Event(seq=1, ts=ts or now_iso(), kind="session_created", payload={
        "session_id": session_id, "artifact_id": artifact_id,
        "inspector_id": inspector_id, "technique": technique.value, "trial": trial,
    })
    return apply_event(None, event), event


def advance_phase(session: InspectionSession, to: Phase,
                  ts: Optional[str] = None) -> tuple[InspectionSession, Event]:
    if phase_index(to) != phase_index(session.phase) + 1:
        raise PhaseError(f"cannot advance from {session.phase.value} to {to.value}")
    if session.phase is Phase.DETECTION and session.timer_running:
        raise PhaseError("stop the detection timer before leaving detection")
    event = _fresh_event(session, "phase_advanced", {"to": to.value}, ts)
    return apply_event(session, event), event


def start_timer(session: InspectionSession, at: Optional[str] = None) -> tuple[InspectionSession, Event]:
    if session.phase is not Phase.DETECTION:
        raise PhaseError("the detection timer runs only in the detection phase")
    if session.timer_running:
        raise PhaseError("detection timer is already running")
    at = at or now_iso()
    event = _fresh_event(session, "timer_started", {"at": at}, at)
    return apply_event(session, event), event


def stop_timer(session: InspectionSession, at: Optional[str] = None) -> tuple[InspectionSession, Event]:
    if not session.timer_running:
        raise PhaseError("detection timer is not running")
    at = at or now_iso()
    if _parse_ts(at) < _parse_ts(session.timer_running_since):
        raise PhaseError("timer stop precedes its start")
    event = _fresh_event(session, "timer_stopped", {"at": at}, at)
    return apply_event(session, event), event


def record_discrepancy(session: InspectionSession, entry: Discrepancy,
                       ts: Optional[str] = None) -> tuple[InspectionSession, Event]:
    """Append a discrepancy during detection; a fresh id is assigned."""
    if session.phase is not Phase.DETECTION:
        raise PhaseError(f"discrepancies can only be recorded in detection "
                         f"(session is in {session.phase.value})")
    fresh_id = f"{session.session_id}-D{len(session.discrepancies) + 1:03d}"
    stored = replace(entry, discrepancy_id=fresh_id, session_id=session.session_id,
                     duplicate_of=None, classification=None)
    event = _fresh_event(session, "discrepancy_recorded", stored.to_payload(), ts)
    return apply_event(session, event), event


def record_answer(session: InspectionSession, question_id: str, answer: Answer,
                  ts: Optional[str] = None) -> tuple[InspectionSession, Event]:
    if session.technique is not TechniqueTag.CHECKLIST:
        raise PhaseError("checklist answers apply only to checklist-guided sessions")
    if session.phase is not Phase.DETECTION:
        raise PhaseError("answers can only be recorded in detection")
    if not re.match(r"^Q(0[1-9]|[12]\d|3[012])$", question_id):
        raise ValueError(f"bad question id {question_id!r}")
    event = _fresh_event(session, "answer_recorded",
                         {"question_id": question_id, "answer": answer.value}, ts)
    return apply_event(session, event), event


def apply_event(session: Optional[InspectionSession], event: Event) -> InspectionSession:
    """Pure fold of one event into session state."""
    if event.kind == "session_created":
        if session is not None:
            raise ProcessError("session_created must be the first event")
        p = event.payload
        return InspectionSession(
            session_id=p["session_id"], artifact_id=p["artifact_id"],
            inspector_id=p["inspector_id"], technique=TechniqueTag(p["technique"]),
            trial=p.get("trial", 1), next_seq=event.seq)
    if session is None:
        raise ProcessError(f"event {event.kind!r} before session_created")
    if event.seq != session.next_seq + 1:
        raise ProcessError(f"event sequence gap: expected {session.next_seq + 1}, got {event.seq}")

    if event.kind == "phase_advanced":
        return replace(session, phase=Phase(event.payload["to"]), next_seq=event.seq)
    if event.kind == "timer_started":
        at = event.payload["at"]
        return replace(session, timer_running_since=at,
                       detection_start=session.detection_start or at, next_seq=event.seq)
    if event.kind == "timer_stopped":
        at = event.payload["at"]
        delta = _parse_ts(at) - _parse_ts(session.timer_running_since)
        elapsed = session.elapsed_us + round(delta.total_seconds() * 1_000_000)
        return replace(session, timer_running_since=None, detection_end=at,
                       elapsed_us=elapsed, next_seq=event.seq)
    if event.kind == "discrepancy_recorded":
        entry = Discrepancy.from_payload(event.payload)
        return replace(session, discrepancies=session.discrepancies + (entry,),
                       next_seq=event.seq)
    if event.kind == "answer_recorded":
        answers = dict(session.checklist_answers)
        answers[event.payload["question_id"]] = Answer(event.payload["answer"])
        return replace(session, checklist_answers=answers, next_seq=event.seq)
    raise ProcessError(f"unknown event kind {event.kind!r}")


def replay_session(events: Iterable[Event]) -> InspectionSession:
    session: Optional[InspectionSession] = None
    for event in events:
        session = apply_event(session, event)
    if session is None:
        raise ProcessError("empty event log")
    return session


# --- planning ----------------------------------------------------------------

@dataclass(frozen=True)
class TrialPlan:
    trial_number: int
    technique: TechniqueTag
    assignments: Mapping[str, str]  # inspector -> artifact id


@dataclass(frozen=True)
class InspectionPlan:
    trials: tuple[TrialPlan, ...]


def plan_assignments(inspectors: Sequence[str], artifacts: Mapping[str, str],
                     trials: Sequence[TechniqueTag]) -> InspectionPlan:
    """Assign artifacts to inspectors for each trial.

    Every trial is a derangement (nobody reviews their own artifact, the
    assignment is injective) and no (inspector, artifact) pair repeats
    across trials. Among valid assignments the lexicographically first
    one per trial is chosen, scanning inspectors in the given order and
    candidate artifacts in author order, so the plan is deterministic.
    """
    if len(inspectors) < 2:
        raise PlanningError("cross-checking needs at least two inspectors")
    if len(set(inspectors)) != len(inspectors):
        raise PlanningError("duplicate inspector ids")
    missing = [i for i in inspectors if i not in artifacts]
    if missing:
        raise PlanningError(f"no authored artifact registered for {missing[0]!r}")
    if len({artifacts[i] for i in inspectors}) != len(inspectors):
        raise PlanningError("each inspector must have authored exactly one distinct artifact")

    n = len(inspectors)
    used: set[tuple[int, int]] = set()  # (inspector index, author index)
    plans: list[TrialPlan] = []
    for trial_number, technique in enumerate(trials, start=1):
        assignment = _find_assignment(n, used)
        if assignment is None:
            raise PlanningError(
                f"no assignment without repeats is possible for trial {trial_number} "
                f"({n} inspectors)")
        for i, a in enumerate(assignment):
            used.add((i, a))
        plans.append(TrialPlan(
            trial_number=trial_number, technique=technique,
            assignments={inspectors[i]: artifacts[inspectors[a]]
                         for i, a in enumerate(assignment)}))
    return InspectionPlan(trials=tuple(plans))


def _find_assignment(n: int, used: set[tuple[int, int]]) -> Optional[list[int]]:
    """Lexicographically smallest injective self-avoiding assignment that
    also avoids previously used (inspector, author) pairs."""
    taken = [False] * n
    result: list[int] = []

    def backtrack(i: int) -> bool:
        if i == n:
            return True
        for a in range(n):
            if a == i or taken[a] or (i, a) in used:
                continue
            taken[a] = True
            result.append(a)
            if backtrack(i + 1):
                return True
            taken[a] = False
            result.pop()
        return False

    return result if backtrack(0) else None


# --- collection --------------------------------------------------------------

@dataclass(frozen=True)
class MergedCollection:
    collection_id: str
    artifact_id: str
    session_ids: tuple[str, ...]
    discrepancies: tuple[Discrepancy, ...]
    next_seq: int = 0

    @property
    def distinct_count(self) -> int:
        return sum(1 for d in self.discrepancies if d.duplicate_of is None)

    @property
    def total_count(self) -> int:
        return len(self.discrepancies)

    def entry(self, discrepancy_id: str) -> Discrepancy:
        for d in self.discrepancies:
            if d.discrepancy_id == discrepancy_id:
                return d
        raise CollectionError(f"unknown discrepancy {discrepancy_id!r}")


@dataclass(frozen=True)
class ClassifiedCollection:
    collection_id: str
    artifact_id: str
    session_ids: tuple[str, ...]
    discrepancies: tuple[Discrepancy, ...]

    def entry(self, discrepancy_id: str) -> Discrepancy:
        for d in self.discrepancies:
            if d.discrepancy_id == discrepancy_id:
                return d
        raise CollectionError(f"unknown discrepancy {discrepancy_id!r}")

    @property
    def distinct_count(self) -> int:
        return sum(1 for d in self.discrepancies if d.duplicate_of is None)

    @property
    def total_count(self) -> int:
        return len(self.discrepancies)

    @property
    def real_defect_count(self) -> int:
        return sum(1 for d in self.discrepancies
                   if d.duplicate_of is None and d.classification is Classification.DEFECT)

    def real_defect_ids(self) -> frozenset[str]:
        return frozenset(d.discrepancy_id for d in self.discrepancies
                         if d.duplicate_of is None and d.classification is Classification.DEFECT)


def collect(sessions: Sequence[InspectionSession], collection_id: str,
            ts: Optional[str] = None) -> tuple[MergedCollection, Event]:
    """Merge the discrepancy lists of all sessions covering one artifact."""
    if not sessions:
        raise CollectionError("nothing to collect")
    artifact_ids = {s.artifact_id for s in sessions}
    if len(artifact_ids) > 1:
        raise CollectionError(f"sessions cover different artifacts: {sorted(artifact_ids)}")
    for s in sessions:
        if phase_index(s.phase) < phase_index(Phase.COLLECTION):
            raise PhaseError(f"session {s.session_id} has not reached collection")
    merged = tuple(d for s in sessions for d in s.discrepancies)
    collection = MergedCollection(
        collection_id=collection_id, artifact_id=artifact_ids.pop(),
        session_ids=tuple(s.session_id for s in sessions), discrepancies=merged)
    event = Event(seq=1, ts=ts or now_iso(), kind="collection_created", payload={
        "collection_id": collection.collection_id,
        "artifact_id": collection.artifact_id,
        "session_ids": list(collection.session_ids),
        "discrepancies": [d.to_payload() for d in merged],
    })
    return replace(collection, next_seq=1), event


def mark_duplicate(collection: MergedCollection, duplicate_id: str, target_id: str,
                   ts: Optional[str] = None) -> tuple[MergedCollection, Event]:
    """Link a discrepancy to an earlier one it duplicates.

    Links always point at a root entry: marking against something that is
    itself a duplicate re-targets to its root, and any links pointing at
    the newly marked entry are re-pointed too, so the link structure
    stays a depth-one forest.
    """
    entry = collection.entry(duplicate_id)
    target = collection.entry(target_id)
    root_id = target.duplicate_of or target.discrepancy_id
    if root_id == duplicate_id:
        raise CollectionError("circular duplicate link")
    order = {d.discrepancy_id: i for i, d in enumerate(collection.discrepancies)}
    if order[root_id] > order[duplicate_id]:
        raise CollectionError("duplicate links must point at an earlier discrepancy")
    if entry.duplicate_of == root_id:
        raise CollectionError(f"{duplicate_id} is already marked a duplicate of {root_id}")
    event = _fresh_collection_event(collection, "duplicate_marked",
                                    {"duplicate_id": duplicate_id, "target_id": root_id}, ts)
    return apply_collection_event(collection, event), event


def discriminate(collection: MergedCollection,
                 decisions: Mapping[str, Classification],
                 ts: Optional[str] = None) -> tuple[ClassifiedCollection, Event]:
    """Classify every distinct discrepancy; duplicates inherit their root's class."""
    roots = [d for d in collection.discrepancies if d.duplicate_of is None]
    root_ids = {d.discrepancy_id for d in roots}
    for did in decisions:
        entry = collection.entry(did)  # raises on unknown ids
        if entry.duplicate_of is not None:
            raise DiscriminationError(
                f"{did} is a duplicate; classify its root {entry.duplicate_of} instead")
    for d in roots:
        if d.discrepancy_id not in decisions:
            raise DiscriminationError(f"missing decision for {d.discrepancy_id}")
    event = _fresh_collection_event(
        collection, "collection_discriminated",
        {"decisions": {did: decisions[did].value for did in sorted(decisions)}}, ts)
    classified = apply_collection_event(collection, event)
    assert isinstance(classified, ClassifiedCollection)
    return classified, event


def _fresh_collection_event(collection: MergedCollection, kind: str, payload: dict,
                            ts: Optional[str]) -> Event:
    return Event(seq=collection.next_seq + 1, ts=ts or now_iso(), kind=kind, payload=payload)


def apply_collection_event(collection: Optional[MergedCollection],
                           event: Event) -> MergedCollection | ClassifiedCollection:
    if event.kind == "collection_created":
        if collection is not None:
            raise ProcessError("collection_created must be the first event")
        p = event.payload
        return MergedCollection(
            collection_id=p["collection_id"], artifact_id=p["artifact_id"],
            session_ids=tuple(p["session_ids"]),
            discrepancies=tuple(Discrepancy.from_payload(d) for d in p["discrepancies"]),
            next_seq=event.seq)
    if collection is None:
        raise ProcessError(f"event {event.kind!r} before collection_created")
    if event.seq != collection.next_seq + 1:
        raise ProcessError(f"event sequence gap: expected {collection.next_seq + 1}, got {event.seq}")

    if event.kind == "duplicate_marked":
        dup_id = event.payload["duplicate_id"]
        root_id = event.payload["target_id"]
        updated = []
        for d in collection.discrepancies:
            if d.discrepancy_id == dup_id:
                updated.append(replace(d, duplicate_of=root_id))
            elif d.duplicate_of == dup_id:
                updated.append(replace(d, duplicate_of=root_id))
            else:
                updated.append(d)
        return replace(collection, discrepancies=tuple(updated), next_seq=event.seq)
    if event.kind == "collection_discriminated":
        decisions = {k: Classification(v) for k, v in event.payload["decisions"].items()}
        classified = []
        for d in collection.discrepancies:
            root = d.duplicate_of or d.discrepancy_id
            classified.append(replace(d, classification=decisions[root]))
        return ClassifiedCollection(
            collection_id=collection.collection_id, artifact_id=collection.artifact_id,
            session_ids=collection.session_ids, discrepancies=tuple(classified))
    raise ProcessError(f"unknown event kind {event.kind!r}")


def replay_collection(events: Iterable[Event]) -> MergedCollection | ClassifiedCollection:
    state: Optional[MergedCollection] = None
    for event in events:
        if isinstance(state, ClassifiedCollection):
            raise ProcessError("events after discrimination")
        state = apply_collection_event(state, event)
    if state is None:
        raise ProcessError("empty event log")
    return state


# --- known defects -----------------------------------------------------------

@dataclass(frozen=True)
class KnownDefectSet:
    """Deduplicated union of real defects across discriminated collections."""

    defects: frozenset[tuple[str, str]]  # (artifact id, root discrepancy id)

    @property
    def size(self) -> int:
        return len(self.defects)

    def for_artifact(self, artifact_id: str) -> int:
        return sum(1 for a, _ in self.defects if a == artifact_id)


def known_defects(collections: Sequence[ClassifiedCollection]) -> KnownDefectSet:
    for c in collections:
        if not isinstance(c, ClassifiedCollection):
            raise PhaseError(f"collection {getattr(c, 'collection_id', '?')} is not discriminated")
    pairs = frozenset(
        (c.artifact_id, did) for c in collections for did in c.real_defect_ids())
    return KnownDefectSet(defects=pairs)


# --- duplicate suggestions ---------------------------------------------------

def suggest_duplicates(collection: MergedCollection,
                       jaccard_threshold: float = 0.6) -> list[tuple[str, str]]:
    """Candidate duplicate pairs for the moderator to confirm.

    A pair is suggested when two discrepancies share scenario and step
    reference, or share a question id with token-Jaccard overlap of the
    descriptions at or above the threshold. Pairs come back in merged
    order (earlier id first).
    """
    entries = collection.discrepancies
    suggestions: list[tuple[str, str]] = []
    for i, a in enumerate(entries):
        for b in entries[i + 1:]:
            if _is_duplicate_candidate(a, b, jaccard_threshold):
                suggestions.append((a.discrepancy_id, b.discrepancy_id))
    return suggestions


def _is_duplicate_candidate(a: Discrepancy, b: Discrepancy, threshold: float) -> bool:
    if a.scenario_id == b.scenario_id and isinstance(a.location, StepRef) \
            and a.location == b.location:
        return True
    if a.question_id and a.question_id == b.question_id:
        ta = set(re.findall(r"\w+", a.description.lower()))
        tb = set(re.findall(r"\w+", b.description.lower()))
        if ta and tb and len(ta & tb) / len(ta | tb) >= threshold:
            return True
    return False


# --- file-backed logs ---------------------------------------------------------

class EventLog:
    """Append-only JSONL log; one event per line, replay order = sequence order.

    A torn final line (crash mid-append) is tolerated and dropped;
    corruption anywhere else is an error naming the offending sequence.
    """

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def append(self, event: Event) -> None:
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(event.to_json() + "\n")
            fh.flush()

    def read(self) -> list[Event]:
        if not self.path.exists():
            return []
        lines = self.path.read_text(encoding="utf-8").splitlines()
        events: list[Event] = []
        for idx, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                event = Event.from_json(line)
            except (json.JSONDecodeError, KeyError) as exc:
                if idx == len(lines) - 1:
                    break  # torn tail from a crash: drop the in-flight event
                raise ProcessError(
                    f"{self.path}: corrupt log record after sequence "
                    f"{events[-1].seq if events else 0}") from exc
            expected = events[-1].seq + 1 if events else 1
            if event.seq != expected:
                raise ProcessError(
                    f"{self.path}: sequence gap at record {event.seq} (expected {expected})")
            events.append(event)
        return events
