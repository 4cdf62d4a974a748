"""In-memory representation of an IoT scenario specification document.

A document mirrors the structured template used for IoT scenario
descriptions: a header (goal, domain, actors, collected data types)
followed by one or more scenarios, each with an interaction arrangement
reference, scenario-local actors, a main flow and optional alternative
and exception flows of numbered steps.

All types are immutable after construction and safe to share across
threads. Source locations are carried for diagnostics but excluded from
structural equality, so a parsed document compares equal to its
re-parsed canonical rendering.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional


@dataclass(frozen=True)
class SourceLocation:
    """1-based line/column position in a source file."""

    line: int
    column: int = 1

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1:
            raise ValueError("source locations are 1-based")


class ActorRole(Enum):
    USER = "user"
    DEVICE = "device"
    SOFTWARE_SYSTEM = "software"


class FacetId(Enum):
    """The six concern areas checked for IoT systems."""

    CONNECTIVITY = "connectivity"
    THINGS = "things"
    BEHAVIOR = "behavior"
    SMARTNESS = "smartness"
    INTERACTIVITY = "interactivity"
    ENVIRONMENT = "environment"


class FlowKind(Enum):
    MAIN = "main"
    ALTERNATIVE = "alternative"
    EXCEPTION = "exception"


ARRANGEMENT_ID_RE = re.compile(r"^IIA-0[1-9]$")
SCENARIO_ID_RE = re.compile(r"^SC\d+$")


@dataclass(frozen=True)
class ActorDecl:
    """One declared actor: a user, device, or software system."""

    name: str
    role: ActorRole
    description: str = ""
    location: Optional[SourceLocation] = field(default=None, compare=False)


@dataclass(frozen=True)
class ArrangementRef:
    """Reference to one of the cataloged interaction arrangements.

    Well-formed ids match IIA-01..IIA-09. The id is kept as written so
    that lint rules can report malformed references; use
    :attr:`is_wellformed` before trusting it.
    """

    arrangement_id: str
    arrangement_name: str = ""

    @property
    def is_wellformed(self) -> bool:
        return ARRANGEMENT_ID_RE.match(self.arrangement_id) is not None


@dataclass(frozen=True)
class Step:
    number: int
    text: str
    location: Optional[SourceLocation] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.number < 1:
            raise ValueError("step numbers are 1-based")
        if not self.text.strip():
            raise ValueError("step text must be non-empty")


@dataclass(frozen=True)
class Flow:
    """A sequence of numbered steps; steps are numbered 1..n per flow."""

    kind: FlowKind
    label: str = ""  # empty for the main flow, e.g. "A1"/"E1" otherwise
    branch_origin: Optional[int] = None  # main-flow step this flow departs from
    steps: tuple[Step, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is FlowKind.MAIN and self.label:
            raise ValueError("the main flow carries no label")
        if self.kind is not FlowKind.MAIN and not self.label:
            raise ValueError("alternative/exception flows require a label")
        numbers = [s.number for s in self.steps]
        if numbers != list(range(1, len(numbers) + 1)):
            raise ValueError("step numbers must be consecutive starting at 1")

    def step(self, number: int) -> Optional[Step]:
        if 1 <= number <= len(self.steps):
            return self.steps[number - 1]
        return None


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    title: str
    main_flow: Flow
    arrangement: Optional[ArrangementRef] = None
    actors: tuple[ActorDecl, ...] = ()
    alternative_flows: tuple[Flow, ...] = ()
    exception_flows: tuple[Flow, ...] = ()
    location: Optional[SourceLocation] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not SCENARIO_ID_RE.match(self.scenario_id):
            raise ValueError(f"scenario id {self.scenario_id!r} must be 'SC' followed by digits")
        if self.main_flow.kind is not FlowKind.MAIN:
            raise ValueError("main_flow must have kind MAIN")
        labels = [f.label for f in self.alternative_flows + self.exception_flows]
        canon = [l.upper() for l in labels]
        if len(set(canon)) != len(canon):
            raise ValueError("flow labels must be unique within a scenario")

    def flows(self) -> Iterator[Flow]:
        yield self.main_flow
        yield from self.alternative_flows
        yield from self.exception_flows

    def flow_by_label(self, label: str) -> Optional[Flow]:
        """Resolve a flow by label; the empty label means the main flow."""
        if label == "":
            return self.main_flow
        wanted = label.upper()
        for flow in self.flows():
            if flow.label.upper() == wanted and flow.kind is not FlowKind.MAIN:
                return flow
        return None


@dataclass(frozen=True)
class DocumentHeader:
    """Document-level fields; emptiness is reported by checks, not here."""

    system_goal: str = ""
    system_domain: str = ""
    actors: tuple[ActorDecl, ...] = ()
    collected_data_types: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScenarioDocument:
    header: DocumentHeader
    scenarios: tuple[Scenario, ...]
    source_name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.scenarios:
            raise ValueError("a document requires at least one scenario")
        ids = [s.scenario_id for s in self.scenarios]
        if len(set(ids)) != len(ids):
            raise ValueError("scenario ids must be unique within a document")

    def scenario(self, scenario_id: str) -> Optional[Scenario]:
        for s in self.scenarios:
            if s.scenario_id == scenario_id:
                return s
        return None


def normalize_term(text: str) -> str:
    """Case-fold and collapse whitespace; the only normalization applied to names."""
    return " ".join(text.split()).casefold()


def resolve_step_ref(doc: ScenarioDocument, scenario_id: str, flow_label: str,
                     step_number: int) -> Optional[Step]:
    """Look up a step by scenario id, flow label ('' = main) and 1-based number.

    Absence is a value: any unresolved component yields None.
    """
    scenario = doc.scenario(scenario_id)
    if scenario is None:
        return None
    flow = scenario.flow_by_label(flow_label)
    if flow is None:
        return None
    return flow.step(step_number)


def enumerate_actor_terms(doc: ScenarioDocument) -> dict[str, set[ActorRole]]:
    """Union of header-level and scenario-level actor declarations.

    Keys are normalized names; values collect every role the name was
    declared under anywhere in the document.
    """
    terms: dict[str, set[ActorRole]] = {}
    for decl in iter_actor_decls(doc):
        terms.setdefault(normalize_term(decl.name), set()).add(decl.role)
    return terms


def iter_actor_decls(doc: ScenarioDocument) -> Iterator[ActorDecl]:
    yield from doc.header.actors
    for scenario in doc.scenarios:
        yield from scenario.actors


def iter_flows(doc: ScenarioDocument) -> Iterator[tuple[Scenario, Flow]]:
    for scenario in doc.scenarios:
        for flow in scenario.flows():
            yield scenario, flow
