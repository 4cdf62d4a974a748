"""Embedded catalog of the 32 checklist questions and the nine
interaction arrangements.

Question texts are carried verbatim; trailing parenthetical examples are
stored separately as hints. Each question carries a facet tag set (only
the nine specific questions have facets) and an automation level that
says how much of it the rule engine can evaluate:

* ``AUTOMATIC`` – structural presence and lexical pattern checks the
  engine decides on its own.
* ``ASSISTED`` – heuristic findings a human inspector must confirm or
  dismiss.
* ``MANUAL`` – shown to the inspector, never machine-evaluated.

Arrangement entries default to id-only placeholders; teams owning the
full arrangement catalog can supply names and required role sets through
a CSV override file (see FORMAT.md).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .model import ActorRole, FacetId


class QuestionPart(Enum):
    GENERAL = "general"
    SPECIFIC = "specific"


class AutomationLevel(Enum):
    AUTOMATIC = "automatic"
    ASSISTED = "assisted"
    MANUAL = "manual"


class DefectType(Enum):
    """Requirements defect taxonomy used to classify discrepancies."""

    OMISSION = "omission"
    AMBIGUITY = "ambiguity"
    INCONSISTENCY = "inconsistency"
    INCORRECT_FACT = "incorrect_fact"
    EXTRANEOUS_INFORMATION = "extraneous_information"


@dataclass(frozen=True)
class ChecklistQuestion:
    question_id: str  # Q01..Q32
    part: QuestionPart
    text: str
    hint: str
    facets: frozenset[FacetId]
    automation: AutomationLevel


@dataclass(frozen=True)
class Checklist:
    version: str
    questions: tuple[ChecklistQuestion, ...]

    def __post_init__(self) -> None:
        expected = [f"Q{i:02d}" for i in range(1, 33)]
        if [q.question_id for q in self.questions] != expected:
            raise ValueError("checklist must contain Q01..Q32 exactly once, in order")
        for q in self.questions:
            general = int(q.question_id[1:]) <= 23
            if general != (q.part is QuestionPart.GENERAL):
                raise ValueError(f"{q.question_id} has the wrong part")
            if q.part is QuestionPart.SPECIFIC and not q.facets:
                raise ValueError(f"specific question {q.question_id} needs at least one facet")
        covered = set().union(*(q.facets for q in self.questions if q.part is QuestionPart.SPECIFIC))
        if covered != set(FacetId):
            raise ValueError("specific questions must cover all six facets")

    def question(self, question_id: str) -> ChecklistQuestion:
        index = int(question_id[1:]) - 1
        if not 0 <= index < 32 or self.questions[index].question_id != question_id:
            raise KeyError(question_id)
        return self.questions[index]


@dataclass(frozen=True)
class ArrangementEntry:
    arrangement_id: str  # IIA-01..IIA-09
    name: str = ""
    required_roles: frozenset[ActorRole] = frozenset()


@dataclass(frozen=True)
class ArrangementCatalog:
    entries: tuple[ArrangementEntry, ...]

    def __post_init__(self) -> None:
        ids = [e.arrangement_id for e in self.entries]
        if ids != [f"IIA-0{i}" for i in range(1, 10)]:
            raise ValueError("arrangement catalog must hold IIA-01..IIA-09 exactly once, in order")

    def entry(self, arrangement_id: str) -> ArrangementEntry | None:
        for e in self.entries:
            if e.arrangement_id == arrangement_id:
                return e
        return None

    @property
    def ids(self) -> frozenset[str]:
        return frozenset(e.arrangement_id for e in self.entries)


CHECKLIST_VERSION = "2"

_GENERAL = QuestionPart.GENERAL
_SPECIFIC = QuestionPart.SPECIFIC
_AUTO = AutomationLevel.AUTOMATIC
_ASSIST = AutomationLevel.ASSISTED
_MANUAL = AutomationLevel.MANUAL

# (id, text, hint, automation, facets)
_QUESTIONS: tuple[tuple[str, str, str, AutomationLevel, tuple[FacetId, ...]], ...] = (
    ("Q01", "Has the overall application domain been established?",
     "Health, leisure, traffic", _AUTO, ()),
    ("Q02", "Is the specific purpose of the system correctly described?",
     "Data visualization, visualization, decision making, and actuation only", _AUTO, ()),
    ("Q03", "Is the type of data collected specified?",
     "Temperature, humidity, pollution", _AUTO, ()),
    ("Q04", "Is it possible to identify who or what collects the data?",
     "Sensors, QR code readers", _ASSIST, ()),
    ("Q05", "Is it possible to identify who or what manages the data collected?",
     "Administrator, decision-maker, users", _ASSIST, ()),
    ("Q06", "Is it possible to identify who or what accesses the data collected?",
     "Things, software systems, users", _ASSIST, ()),
    ("Q07", "Is the user interface device that displays the data described?",
     "dashboard, smartphone, tablet", _ASSIST, ()),
    ("Q08", "Is it possible to identify who is viewing the data?",
     "Things, software systems, users", _ASSIST, ()),
    ("Q09", "Is it possible to identify the source from which the data is provided?",
     "Chairs, table, automobiles, houses, buildings", _ASSIST, ()),
    ("Q10", "Are the roles involved in the system described?",
     "Things, software systems, users", _AUTO, ()),
    ("Q11", "Is there any description of each actor in the specified scenarios?",
     "", _ASSIST, ()),
    ("Q12", "Is it possible to identify the source of data provision?",
     "", _ASSIST, ()),
    ("Q13", "Has each action within the scenario been described clearly and contains no extraneous information?",
     "", _MANUAL, ()),
    ("Q14", "Is there any sequence of actions in confused comprehension scenarios?",
     "", _MANUAL, ()),
    ("Q15", "Are the actors described in the scenarios consistent with the actors described in the arrangements?",
     "Things, software systems, users", _ASSIST, ()),
    ("Q16", "Are the scenarios related to the arrangements correctly?",
     "", _ASSIST, ()),
    ("Q17", "Do the scenarios seek to be accurate by presenting title and flows?",
     "Presenting the purpose and actions of the system directly and explicitly", _AUTO, ()),
    ("Q18", "Are adverbs that generate more than one possibility of interpretation in scenarios avoided?",
     "Probably, possibly, supposedly", _AUTO, ()),
    ("Q19", "Are condition terms (like \"if\", \"go to\", \"while\") used correctly?",
     "", _AUTO, ()),
    ("Q20", "When you use words like \"things,\" \"data\" in the scenario, do they have the same meaning in other parts of the same scenario?",
     "", _ASSIST, ()),
    ("Q21", "Is it possible to identify \"things\" described with a given function in the arrangements that represent another function in the scenarios?",
     "", _ASSIST, ()),
    ("Q22", "Are the alternative and/or exception flows described?",
     "", _AUTO, ()),
    ("Q23", "Does the scenario specification identify the matching ID arrangement?",
     "AII1, AII2, ..., AII9", _AUTO, ()),
    ("Q24", "Is it possible to identify the specific context in which the system is embedded?",
     "Smart room, smart greenhouse, autonomous vehicle, healthcare", _ASSIST,
     (FacetId.ENVIRONMENT,)),
    ("Q25", "Are the limitations of the environment described?",
     "e.g., lack of connectivity structure, lack of hardware structure, inadequate infrastructure",
     _MANUAL, (FacetId.ENVIRONMENT,)),
    ("Q26", "Are the technologies associated with system objects described?",
     "smartphones, smartwatches, wearables", _ASSIST, (FacetId.THINGS,)),
    ("Q27", "Are the events that the system has identified?",
     "e.g., on/off an object, sending data", _ASSIST, (FacetId.BEHAVIOR,)),
    ("Q28", "What kind of communication technology does the system use in the scenarios?",
     "Bluetooth, intranet, internet ...", _ASSIST, (FacetId.CONNECTIVITY,)),
    ("Q29", "Does the proposed communication technology meet the geographic/physical specifications of the system?",
     "Large, medium or small scale", _ASSIST, (FacetId.CONNECTIVITY,)),
    ("Q30", "Is it possible to identify how the system will react according to changes in the environment?",
     "", _MANUAL, (FacetId.SMARTNESS, FacetId.BEHAVIOR, FacetId.ENVIRONMENT)),
    ("Q31", "Are the interactions between the system and the environment represented in the scenarios?",
     "", _MANUAL, (FacetId.INTERACTIVITY, FacetId.ENVIRONMENT)),
    ("Q32", "Is it possible to identify the interaction between actors?",
     "", _MANUAL, (FacetId.INTERACTIVITY,)),
)


def load_default() -> tuple[Checklist, ArrangementCatalog]:
    """Build the embedded checklist and the placeholder arrangement catalog."""
    questions = tuple(
        ChecklistQuestion(
            question_id=qid,
            part=_GENERAL if int(qid[1:]) <= 23 else _SPECIFIC,
            text=text,
            hint=hint,
            facets=frozenset(facets),
            automation=automation,
        )
        for qid, text, hint, automation, facets in _QUESTIONS
    )
    checklist = Checklist(version=CHECKLIST_VERSION, questions=questions)
    catalog = ArrangementCatalog(entries=tuple(
        ArrangementEntry(arrangement_id=f"IIA-0{i}") for i in range(1, 10)
    ))
    return checklist, catalog


def questions_for_facet(checklist: Checklist, facet: FacetId) -> tuple[ChecklistQuestion, ...]:
    return tuple(q for q in checklist.questions if facet in q.facets)


def automation_partition(checklist: Checklist) -> dict[AutomationLevel, frozenset[str]]:
    """Partition question ids by automation level; the three sets are disjoint
    and cover Q01..Q32."""
    return {
        level: frozenset(q.question_id for q in checklist.questions if q.automation is level)
        for level in AutomationLevel
    }


_ROLE_TOKENS = {"user": ActorRole.USER, "device": ActorRole.DEVICE,
                "software": ActorRole.SOFTWARE_SYSTEM}


def load_arrangement_catalog(path: str | Path) -> ArrangementCatalog:
    """Load an arrangement catalog override.

    CSV columns: id, name, required_roles. Roles are ``|``-separated
    tokens from {user, device, software}. Ids absent from the file keep
    their placeholder entry; `#` lines are comments.
    """
    overrides: dict[str, ArrangementEntry] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    for row in rows:
        if len(row) < 1 or not row[0].strip():
            continue
        arrangement_id = row[0].strip().upper()
        if arrangement_id == "ID":  # optional header row
            continue
        if not arrangement_id.startswith("IIA-0"):
            raise ValueError(f"bad arrangement id in catalog file: {row[0]!r}")
        name = row[1].strip() if len(row) > 1 else ""
        roles: set[ActorRole] = set()
        if len(row) > 2 and row[2].strip():
            for token in row[2].split("|"):
                token = token.strip().lower()
                if token not in _ROLE_TOKENS:
                    raise ValueError(f"unknown role token {token!r} in catalog file")
                roles.add(_ROLE_TOKENS[token])
        overrides[arrangement_id] = ArrangementEntry(
            arrangement_id=arrangement_id, name=name, required_roles=frozenset(roles))
    entries = tuple(
        overrides.get(f"IIA-0{i}", ArrangementEntry(arrangement_id=f"IIA-0{i}"))
        for i in range(1, 10)
    )
    return ArrangementCatalog(entries=entries)
