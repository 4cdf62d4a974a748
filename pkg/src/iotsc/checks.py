"""Deterministic rule engine for the machine-checkable checklist questions.

Automatic rules are structural presence and lexical pattern checks the
engine decides on its own; Assisted rules are heuristics whose findings
a human inspector confirms or dismisses during a session. Manual
questions are never evaluated here.

Every rule maps to a default defect type and severity (RULE_TABLE).
Findings are ordered by (scenario order, location, question id) and the
engine is a pure function of its inputs: equal inputs give identical
finding lists.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .catalog import (
    ArrangementCatalog,
    AutomationLevel,
    Checklist,
    DefectType,
    load_default,
)
from .lexicons import DEFAULT_LEXICONS, Lexicons, compile_terms
from .model import (
    ActorRole,
    ArrangementRef,
    Scenario,
    ScenarioDocument,
    SourceLocation,
    normalize_term,
)


class FindingSeverity(Enum):
    ERROR = "error"
    ADVISORY = "advisory"


@dataclass(frozen=True)
class Finding:
    """One automated check result; location None marks a document-level finding."""

    question_id: str
    confidence: AutomationLevel
    message: str
    suggested_defect_type: DefectType
    severity: FindingSeverity = FindingSeverity.ERROR
    scenario_id: Optional[str] = None
    location: Optional[SourceLocation] = None

    def __post_init__(self) -> None:
        if self.confidence is AutomationLevel.MANUAL:
            raise ValueError("findings are never produced for manual questions")
        if not self.message:
            raise ValueError("finding message must be non-empty")

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "confidence": self.confidence.value,
            "severity": self.severity.value,
            "scenario_id": self.scenario_id,
            "line": self.location.line if self.location else None,
            "column": self.location.column if self.location else None,
            "message": self.message,
            "suggested_defect_type": self.suggested_defect_type.value,
        }


# question id -> (automation, default defect type, severity)
RULE_TABLE: dict[str, tuple[AutomationLevel, DefectType, FindingSeverity]] = {
    "Q01": (AutomationLevel.AUTOMATIC, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q02": (AutomationLevel.AUTOMATIC, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q03": (AutomationLevel.AUTOMATIC, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q04": (AutomationLevel.ASSISTED, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q05": (AutomationLevel.ASSISTED, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q06": (AutomationLevel.ASSISTED, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q07": (AutomationLevel.ASSISTED, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q08": (AutomationLevel.ASSISTED, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q09": (AutomationLevel.ASSISTED, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q10": (AutomationLevel.AUTOMATIC, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q11": (AutomationLevel.ASSISTED, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q12": (AutomationLevel.ASSISTED, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q15": (AutomationLevel.ASSISTED, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q16": (AutomationLevel.ASSISTED, DefectType.INCONSISTENCY, FindingSeverity.ERROR),
    "Q17": (AutomationLevel.AUTOMATIC, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q18": (AutomationLevel.AUTOMATIC, DefectType.AMBIGUITY, FindingSeverity.ERROR),
    "Q19": (AutomationLevel.AUTOMATIC, DefectType.INCORRECT_FACT, FindingSeverity.ERROR),
    "Q20": (AutomationLevel.ASSISTED, DefectType.INCONSISTENCY, FindingSeverity.ERROR),
    "Q21": (AutomationLevel.ASSISTED, DefectType.INCONSISTENCY, FindingSeverity.ERROR),
    "Q22": (AutomationLevel.AUTOMATIC, DefectType.OMISSION, FindingSeverity.ADVISORY),
    "Q23": (AutomationLevel.AUTOMATIC, DefectType.INCORRECT_FACT, FindingSeverity.ERROR),
    "Q24": (AutomationLevel.ASSISTED, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q26": (AutomationLevel.ASSISTED, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q27": (AutomationLevel.ASSISTED, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q28": (AutomationLevel.ASSISTED, DefectType.OMISSION, FindingSeverity.ERROR),
    "Q29": (AutomationLevel.ASSISTED, DefectType.INCORRECT_FACT, FindingSeverity.ERROR),
}

# Scale vocabulary for the communication-reach heuristic (Q29). Crude by
# design: the inspector adjudicates.
SHORT_RANGE_TECH = frozenset({"bluetooth", "nfc"})
LARGE_SCALE_TERMS = frozenset({"large", "large-scale", "city", "farm", "region", "nationwide"})

_GO_TO_RE = re.compile(r"\bGO\s+TO\s+(\d+|[A-Za-z][A-Za-z0-9_-]*)\b", re.IGNORECASE)
_LEADING_COND_RE = re.compile(r"^(IF|WHILE)\b(.*)$", re.IGNORECASE)


def _finding(question_id: str, message: str, scenario_id: Optional[str] = None,
             location: Optional[SourceLocation] = None,
             defect_type: Optional[DefectType] = None,
             confidence: Optional[AutomationLevel] = None) -> Finding:
    automation, default_defect, severity = RULE_TABLE[question_id]
    return Finding(
        question_id=question_id,
        confidence=confidence or automation,
        message=message,
        suggested_defect_type=defect_type or default_defect,
        severity=severity,
        scenario_id=scenario_id,
        location=location,
    )


def _mentions(pattern: re.Pattern[str], text: str) -> bool:
    return pattern.search(text) is not None


def _name_pattern(names: Iterable[str]) -> Optional[re.Pattern[str]]:
    normalized = sorted({normalize_term(n) for n in names if n.strip()},
                        key=lambda t: (-len(t), t))
    if not normalized:
        return None
    parts = [re.escape(n).replace(r"\ ", r"\s+") for n in normalized]
    return re.compile(r"(?<!\w)(?:" + "|".join(parts) + r")(?!\w)", re.IGNORECASE)


def run_checks(doc: ScenarioDocument,
               checklist: Optional[Checklist] = None,
               catalog: Optional[ArrangementCatalog] = None,
               lexicons: Optional[Lexicons] = None) -> list[Finding]:
    """Evaluate every Automatic and Assisted rule against a parsed document."""
    if checklist is None or catalog is None:
        default_checklist, default_catalog = load_default()
        checklist = checklist or default_checklist
        catalog = catalog or default_catalog
    lexicons = lexicons or DEFAULT_LEXICONS

    findings: list[Finding] = []
    findings.extend(_check_header_fields(doc))
    findings.extend(_check_document_lexicon_presence(doc, lexicons))
    findings.extend(check_actor_consistency(doc, catalog, lexicons))
    findings.extend(_check_cross_scenario_terms(doc))
    findings.extend(_check_actor_descriptions(doc))
    findings.extend(_check_device_technology(doc, lexicons))
    for scenario in doc.scenarios:
        findings.extend(check_flow_shape(scenario))
        findings.extend(_check_scenario_actor_roles(scenario))
        findings.extend(check_condition_terms(scenario))
        findings.extend(_check_vague_adverbs(scenario, lexicons))
        findings.extend(_check_arrangement_ref(scenario, catalog))
        findings.extend(_check_communication_scale(scenario, doc, lexicons))

    order = {s.scenario_id: i for i, s in enumerate(doc.scenarios)}

    def sort_key(f: Finding) -> tuple:
        scenario_rank = order.get(f.scenario_id, -1) if f.scenario_id else -1
        line = f.location.line if f.location else 0
        column = f.location.column if f.location else 0
        return (scenario_rank, line, column, f.question_id)

    return sorted(findings, key=sort_key)


# --- header and document-wide rules -----------------------------------------

def _check_header_fields(doc: ScenarioDocument) -> list[Finding]:
    findings = []
    header = doc.header
    if not header.system_domain.strip():
        findings.append(_finding("Q01", "the overall application domain is not established"))
    if not header.system_goal.strip():
        findings.append(_finding("Q02", "the specific purpose of the system is not described"))
    if not header.collected_data_types:
        findings.append(_finding("Q03", "no collected data types are specified"))
    return findings


def _all_step_texts(doc: ScenarioDocument) -> list[str]:
    return [step.text for scenario in doc.scenarios
            for flow in scenario.flows() for step in flow.steps]


def _check_document_lexicon_presence(doc: ScenarioDocument, lexicons: Lexicons) -> list[Finding]:
    """Presence heuristics: a signal absent from every step of the document."""
    findings = []
    steps = _all_step_texts(doc)
    joined = "\n".join(steps)

    sensing = compile_terms(lexicons.sensing_devices)
    ui = compile_terms(lexicons.ui_devices)
    events = compile_terms(lexicons.event_verbs)
    comms = compile_terms(lexicons.communication_technologies)

    if not _mentions(sensing, joined):
        findings.append(_finding(
            "Q04", "no sensing or collecting device is mentioned in any step"))
    roles = {decl.role for decl in doc.header.actors}
    for scenario in doc.scenarios:
        roles.update(decl.role for decl in scenario.actors)
    if ActorRole.USER not in roles and ActorRole.SOFTWARE_SYSTEM not in roles:
        findings.append(_finding(
            "Q05", "no user or software system is declared to manage the collected data"))
    if not _mentions(ui, joined):
        findings.append(_finding(
            "Q07", "no user-interface device that displays the data is mentioned"))
    if not _mentions(events, joined):
        findings.append(_finding(
            "Q27", "no system events (switching, sending, detecting) are described in the steps"))
    if not _mentions(comms, joined):
        findings.append(_finding(
            "Q28", "no communication technology is mentioned in the scenarios"))

    actor_names = _name_pattern(
        [d.name for d in doc.header.actors]
        + [d.name for s in doc.scenarios for d in s.actors])
    data_word = re.compile(r"(?<!\w)data(?!\w)", re.IGNORECASE)
    if not any(actor_names and _mentions(actor_names, t) and _mentions(data_word, t)
               for t in steps):
        findings.append(_finding(
            "Q06", "no step shows a declared actor accessing the data"))

    user_names = _name_pattern(
        [d.name for d in doc.header.actors if d.role is ActorRole.USER]
        + [d.name for s in doc.scenarios for d in s.actors if d.role is ActorRole.USER])
    if not any(user_names and _mentions(user_names, t) and _mentions(ui, t) for t in steps):
        findings.append(_finding(
            "Q08", "no step shows a declared user viewing data on an interface device"))

    if doc.header.collected_data_types:
        data_terms = _name_pattern(doc.header.collected_data_types)
        if data_terms and not _mentions(data_terms, joined):
            findings.append(_finding(
                "Q09", "the declared data types never appear in any scenario step"))

    if not any(_mentions(sensing, t) and _mentions(events, t) for t in steps):
        findings.append(_finding(
            "Q12", "no step shows a device collecting or sending data, so the source "
                   "of data provision is unclear"))

    domain = doc.header.system_domain.strip()
    if domain:
        domain_terms = _name_pattern(re.findall(r"\w+", domain))
        titles_and_steps = "\n".join([s.title for s in doc.scenarios] + steps)
        if domain_terms and not _mentions(domain_terms, titles_and_steps):
            findings.append(_finding(
                "Q24", f"the declared domain {domain!r} is never mentioned in any "
                       f"scenario title or step; the embedding context may be missing"))
    return findings


def _check_actor_descriptions(doc: ScenarioDocument) -> list[Finding]:
    findings = []
    for decl in doc.header.actors:
        if not decl.description.strip():
            findings.append(_finding(
                "Q11", f"actor {decl.name!r} has no description", location=decl.location))
    for scenario in doc.scenarios:
        for decl in scenario.actors:
            if not decl.description.strip():
                findings.append(_finding(
                    "Q11", f"actor {decl.name!r} has no description",
                    scenario_id=scenario.scenario_id, location=decl.location))
    return findings


def _check_cross_scenario_terms(doc: ScenarioDocument) -> list[Finding]:
    """Q20: the same term declared under conflicting roles in two scenarios.

    Symmetric on purpose: every conflicting declaration is flagged, so
    removing a scenario can only remove findings, never add them.
    """
    findings = []
    for scenario in doc.scenarios:
        for decl in scenario.actors:
            key = normalize_term(decl.name)
            witness = next(
                ((other.scenario_id, other_decl.role)
                 for other in doc.scenarios if other.scenario_id != scenario.scenario_id
                 for other_decl in other.actors
                 if normalize_term(other_decl.name) == key and other_decl.role is not decl.role),
                None)
            if witness is not None:
                findings.append(_finding(
                    "Q20",
                    f"term {decl.name!r} is used as {decl.role.value} here but as "
                    f"{witness[1].value} in {witness[0]}",
                    scenario_id=scenario.scenario_id, location=decl.location))
    return findings


# --- named operations --------------------------------------------------------

def check_actor_consistency(doc: ScenarioDocument, catalog: ArrangementCatalog,
                            lexicons: Optional[Lexicons] = None) -> list[Finding]:
    """Q21 role clashes against the header and Q15 arrangement/actor mismatches."""
    lexicons = lexicons or DEFAULT_LEXICONS
    findings = []

    header_roles: dict[str, tuple[ActorRole, str]] = {}
    for decl in doc.header.actors:
        header_roles.setdefault(normalize_term(decl.name), (decl.role, decl.name))

    for scenario in doc.scenarios:
        local_roles: dict[str, ActorRole] = {}
        for decl in scenario.actors:
            key = normalize_term(decl.name)
            clash = header_roles.get(key)
            if clash is not None and clash[0] is not decl.role:
                findings.append(_finding(
                    "Q21",
                    f"actor {decl.name!r} is declared as {clash[0].value} in the header "
                    f"but listed under {decl.role.value} in {scenario.scenario_id}",
                    scenario_id=scenario.scenario_id, location=decl.location))
            prev = local_roles.get(key)
            if prev is not None and prev is not decl.role:
                findings.append(_finding(
                    "Q21",
                    f"actor {decl.name!r} is declared under two roles in "
                    f"{scenario.scenario_id}",
                    scenario_id=scenario.scenario_id, location=decl.location))
            local_roles.setdefault(key, decl.role)

        # (b) arrangement role requirements not covered by declared actors
        if scenario.arrangement is not None:
            entry = catalog.entry(scenario.arrangement.arrangement_id)
            if entry is not None and entry.required_roles:
                declared = {d.role for d in scenario.actors} | {d.role for d in doc.header.actors}
                missing = sorted(entry.required_roles - declared, key=lambda r: r.value)
                if missing:
                    names = ", ".join(r.value for r in missing)
                    findings.append(_finding(
                        "Q15",
                        f"arrangement {entry.arrangement_id} requires roles [{names}] "
                        f"that the scenario does not declare",
                        scenario_id=scenario.scenario_id, location=scenario.location))

        # (c) device-like noun in a step that mentions no declared actor
        declared_names = _name_pattern(
            [d.name for d in doc.header.actors] + [d.name for d in scenario.actors])
        device_terms = compile_terms(lexicons.sensing_devices | lexicons.ui_devices)
        for flow in scenario.flows():
            for step in flow.steps:
                if declared_names is not None and _mentions(declared_names, step.text):
                    continue
                hit = device_terms.search(step.text)
                if hit:
                    findings.append(_finding(
                        "Q15",
                        f"step mentions device-like term {hit.group(0)!r} but no declared actor",
                        scenario_id=scenario.scenario_id, location=step.location,
                        defect_type=DefectType.INCONSISTENCY))
    return findings


def check_condition_terms(scenario: Scenario) -> list[Finding]:
    """Q19: GO TO targets must resolve; IF/WHILE clauses need a consequent.

    IF/WHILE are recognized only at the start of a step (mid-sentence
    prose is left alone); GO TO is recognized anywhere. A numeric GO TO
    target resolves within the current flow; a label target must name
    one of the scenario's flows.
    """
    findings = []
    labels = {f.label.upper() for f in scenario.flows() if f.label}
    for flow in scenario.flows():
        for step in flow.steps:
            for match in _GO_TO_RE.finditer(step.text):
                target = match.group(1)
                if target.isdigit():
                    if flow.step(int(target)) is None:
                        findings.append(_finding(
                            "Q19",
                            f"GO TO {target} does not resolve to a step of this flow",
                            scenario_id=scenario.scenario_id, location=step.location))
                elif target.upper() not in labels:
                    findings.append(_finding(
                        "Q19",
                        f"GO TO {target} does not name a flow of this scenario",
                        scenario_id=scenario.scenario_id, location=step.location))
            cm = _LEADING_COND_RE.match(step.text)
            if cm:
                keyword = cm.group(1).upper()
                rest = cm.group(2)
                clause, comma, consequent = rest.partition(",")
                if not comma:
                    findings.append(_finding(
                        "Q19",
                        f"{keyword} clause has no comma separating the condition from "
                        f"its consequent; structure unclear",
                        scenario_id=scenario.scenario_id, location=step.location,
                        defect_type=DefectType.AMBIGUITY,
                        confidence=AutomationLevel.ASSISTED))
                elif not consequent.strip():
                    findings.append(_finding(
                        "Q19",
                        f"{keyword} condition {clause.strip()!r} has no consequent text",
                        scenario_id=scenario.scenario_id, location=step.location,
                        defect_type=DefectType.OMISSION))
    return findings


def check_flow_shape(scenario: Scenario) -> list[Finding]:
    """Q17 title/flow presence; Q22 advisory when no alternative or exception flows."""
    findings = []
    if not scenario.title.strip():
        findings.append(_finding(
            "Q17", "scenario has no title", scenario_id=scenario.scenario_id,
            location=scenario.location))
    if not scenario.main_flow.steps:
        findings.append(_finding(
            "Q17", "scenario main flow has no steps", scenario_id=scenario.scenario_id,
            location=scenario.location))
    if not scenario.alternative_flows and not scenario.exception_flows:
        findings.append(_finding(
            "Q22", "no alternative or exception flows are described",
            scenario_id=scenario.scenario_id, location=scenario.location))
    return findings


# --- per-scenario rules ------------------------------------------------------

def _check_scenario_actor_roles(scenario: Scenario) -> list[Finding]:
    """Q10: the scenario's role sections declare no actors at all."""
    if scenario.actors:
        return []
    return [_finding(
        "Q10", "scenario declares no actors in any role section",
        scenario_id=scenario.scenario_id, location=scenario.location)]


def _check_vague_adverbs(scenario: Scenario, lexicons: Lexicons) -> list[Finding]:
    pattern = compile_terms(lexicons.vague_adverbs)
    findings = []
    for flow in scenario.flows():
        for step in flow.steps:
            seen: set[str] = set()
            for match in pattern.finditer(step.text):
                term = match.group(0).lower()
                if term in seen:
                    continue
                seen.add(term)
                findings.append(_finding(
                    "Q18",
                    f"vague adverb {term!r} allows more than one interpretation",
                    scenario_id=scenario.scenario_id, location=step.location))
    return findings


def _check_arrangement_ref(scenario: Scenario, catalog: ArrangementCatalog) -> list[Finding]:
    ref: Optional[ArrangementRef] = scenario.arrangement
    if ref is None:
        return [_finding(
            "Q23", "scenario does not identify its interaction arrangement",
            scenario_id=scenario.scenario_id, location=scenario.location,
            defect_type=DefectType.OMISSION)]
    findings = []
    if not ref.is_wellformed:
        findings.append(_finding(
            "Q23",
            f"arrangement id {ref.arrangement_id!r} does not match IIA-01..IIA-09",
            scenario_id=scenario.scenario_id, location=scenario.location))
    elif ref.arrangement_id not in catalog.ids:
        findings.append(_finding(
            "Q23",
            f"arrangement id {ref.arrangement_id!r} is not in the arrangement catalog",
            scenario_id=scenario.scenario_id, location=scenario.location))
    else:
        entry = catalog.entry(ref.arrangement_id)
        if (entry is not None and entry.name and ref.arrangement_name
                and normalize_term(entry.name) != normalize_term(ref.arrangement_name)):
            findings.append(_finding(
                "Q16",
                f"arrangement name {ref.arrangement_name!r} does not match catalog "
                f"name {entry.name!r} for {ref.arrangement_id}",
                scenario_id=scenario.scenario_id, location=scenario.location))
    return findings


def _check_communication_scale(scenario: Scenario, doc: ScenarioDocument,
                               lexicons: Lexicons) -> list[Finding]:
    """Q29: a short-range technology used in a large-scale setting."""
    short_range_terms = frozenset(
        t for t in lexicons.communication_technologies if t in SHORT_RANGE_TECH)
    if not short_range_terms:
        return []
    short_range = compile_terms(short_range_terms)
    scale = compile_terms(LARGE_SCALE_TERMS)
    scenario_text = "\n".join(
        [scenario.title] + [s.text for f in scenario.flows() for s in f.steps])
    context_text = scenario_text + "\n" + doc.header.system_goal + "\n" + doc.header.system_domain
    if not _mentions(scale, context_text):
        return []
    findings = []
    for flow in scenario.flows():
        for step in flow.steps:
            hit = short_range.search(step.text)
            if hit:
                findings.append(_finding(
                    "Q29",
                    f"short-range technology {hit.group(0)!r} may not meet the "
                    f"large-scale setting described",
                    scenario_id=scenario.scenario_id, location=step.location))
    return findings


def _check_device_technology(doc: ScenarioDocument, lexicons: Lexicons) -> list[Finding]:
    """Q26: a declared device carries no recognizable technology term."""
    tech = compile_terms(lexicons.sensing_devices | lexicons.ui_devices
                         | lexicons.communication_technologies)
    findings = []
    for decl in doc.header.actors:
        if decl.role is ActorRole.DEVICE and not _mentions(tech, f"{decl.name} {decl.description}"):
            findings.append(_finding(
                "Q26", f"device {decl.name!r} has no associated technology in its "
                       f"name or description", location=decl.location))
    for scenario in doc.scenarios:
        for decl in scenario.actors:
            if decl.role is ActorRole.DEVICE and not _mentions(tech, f"{decl.name} {decl.description}"):
                findings.append(_finding(
                    "Q26", f"device {decl.name!r} has no associated technology in its "
                           f"name or description",
                    scenario_id=scenario.scenario_id, location=decl.location))
    return findings
