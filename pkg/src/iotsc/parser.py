"""Parser and canonical renderer for the `.iotsc` scenario file format.

The format is line-oriented (see FORMAT.md at the repository root):
sections in square brackets (``[HEADER]``, ``[SCENARIO SC01]``), ``KEY:``
lines, an ``ACTORS:`` block with role sub-lines, flow headers, and
``<n>. <text>`` step lines. Keywords are case-insensitive on input and
upper-case in canonical output; line endings are normalized to LF.

``parse`` never raises on valid UTF-8 input: problems come back as
diagnostics, and Error diagnostics mean no document is produced.
``render`` emits the canonical form, which is a fixed point:
``render(parse(render(doc)))`` is byte-identical to ``render(doc)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

from .model import (
    ActorDecl,
    ActorRole,
    ArrangementRef,
    DocumentHeader,
    Flow,
    FlowKind,
    Scenario,
    ScenarioDocument,
    SourceLocation,
    Step,
)

FILE_EXTENSION = ".iotsc"


class DiagnosticSeverity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: DiagnosticSeverity
    message: str
    location: SourceLocation

    def __str__(self) -> str:
        return f"{self.location.line}:{self.location.column}: {self.severity.value}: {self.message}"


@dataclass(frozen=True)
class ParseResult:
    """Outcome of a parse: a document on success, diagnostics either way."""

    document: Optional[ScenarioDocument]
    diagnostics: tuple[ParseDiagnostic, ...]

    @property
    def ok(self) -> bool:
        return self.document is not None

    @property
    def errors(self) -> tuple[ParseDiagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity is DiagnosticSeverity.ERROR)

    @property
    def warnings(self) -> tuple[ParseDiagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity is DiagnosticSeverity.WARNING)


_SECTION_RE = re.compile(r"^\[(.+)\]\s*$")
_SCENARIO_SECTION_RE = re.compile(r"^scenario\s+(\S+)$", re.IGNORECASE)
_KEY_RE = re.compile(r"^([A-Za-z][A-Za-z0-9 _-]*):\s*(.*)$")
_STEP_RE = re.compile(r"^(\d+)\.(?:\s+(.*))?$")
_MAIN_FLOW_LINE_RE = re.compile(r"^main\s+flow\s*:\s*(.*)$", re.IGNORECASE)
_BRANCH_FLOW_LINE_RE = re.compile(
    r"^(alternative|exception)\s+flow(?:\s+([A-Za-z][A-Za-z0-9_-]*))?"
    r"(?:\s*\(\s*from\s+(\d+)\s*\))?\s*:\s*(.*)$",
    re.IGNORECASE,
)
_ARRANGEMENT_RE = re.compile(r"^(\S+?)(?:\s*\((.*)\))?$")

_HEADER_KEYS = {"GOAL", "DOMAIN", "ACTORS", "DATA"}
_HEADER_ROLE_TOKENS = {"user": ActorRole.USER, "device": ActorRole.DEVICE,
                       "software": ActorRole.SOFTWARE_SYSTEM}
_ACTOR_BLOCK_KEYS = {"USERS": ActorRole.USER, "DEVICES": ActorRole.DEVICE,
                     "SOFTWARE": ActorRole.SOFTWARE_SYSTEM}


def parse_file(path: str | Path) -> ParseResult:
    p = Path(path)
    return parse(p.read_text(encoding="utf-8"), source_name=str(p))


def parse(text: str, source_name: str = "<input>") -> ParseResult:
    return _Parser(text, source_name).run()


class _Parser:
    """Single-pass line parser; collects diagnostics instead of raising."""

    def __init__(self, text: str, source_name: str) -> None:
        self.lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
        self.source_name = source_name
        self.diagnostics: list[ParseDiagnostic] = []

    def error(self, line: int, column: int, message: str) -> None:
        self.diagnostics.append(ParseDiagnostic(
            DiagnosticSeverity.ERROR, message, SourceLocation(line, column)))

    def warn(self, line: int, column: int, message: str) -> None:
        self.diagnostics.append(ParseDiagnostic(
            DiagnosticSeverity.WARNING, message, SourceLocation(line, column)))

    def run(self) -> ParseResult:
        sections = self._split_sections()
        header: Optional[DocumentHeader] = None
        scenarios: list[Scenario] = []
        seen_ids: dict[str, int] = {}

        for kind, name, line_no, body in sections:
            if kind == "header":
                parsed = self._parse_header(body)
                if header is None:
                    header = parsed
                else:
                    self.warn(line_no, 1, "duplicate [HEADER] section; later values override")
                    header = _merge_headers(header, parsed)
            elif kind == "scenario":
                scenario = self._parse_scenario(name, line_no, body)
                if scenario is None:
                    continue
                if scenario.scenario_id in seen_ids:
                    self.error(line_no, 1, f"duplicate scenario id {scenario.scenario_id}")
                    continue
                seen_ids[scenario.scenario_id] = line_no
                scenarios.append(scenario)

        if header is None:
            self.error(1, 1, "missing [HEADER] section")
        if not scenarios and not self.errors():
            self.error(1, 1, "document declares no scenarios")

        if self.errors():
            return ParseResult(None, tuple(self.diagnostics))
        doc = ScenarioDocument(header=header, scenarios=tuple(scenarios),
                               source_name=self.source_name)
        return ParseResult(doc, tuple(self.diagnostics))

    def errors(self) -> list[ParseDiagnostic]:
        return [d for d in self.diagnostics if d.severity is DiagnosticSeverity.ERROR]

    def _split_sections(self) -> list[tuple[str, str, int, list[tuple[int, str]]]]:
        """Group lines into (kind, scenario_id, header_line_no, body) chunks."""
        sections: list[tuple[str, str, int, list[tuple[int, str]]]] = []
        current: Optional[list[tuple[int, str]]] = None
        skipping = False
        for idx, raw in enumerate(self.lines, start=1):
            stripped = raw.strip()
            m = _SECTION_RE.match(stripped)
            if m:
                label = m.group(1).strip()
                skipping = False
                if label.upper() == "HEADER":
                    current = []
                    sections.append(("header", "", idx, current))
                    continue
                sm = _SCENARIO_SECTION_RE.match(label)
                if sm:
                    raw_id = sm.group(1).upper()
                    if not re.match(r"^SC\d+$", raw_id):
                        self.error(idx, 1, f"invalid scenario id {sm.group(1)!r}; expected SC<digits>")
                        current = None
                        skipping = True
                        continue
                    current = []
                    sections.append(("scenario", raw_id, idx, current))
                    continue
                self.warn(idx, 1, f"unknown section [{label}] skipped")
                current = None
                skipping = True
                continue
            if not stripped:
                continue
            if current is None:
                if not skipping:
                    self.warn(idx, 1, "content outside any section ignored")
                continue
            current.append((idx, raw))
        return sections

    def _parse_header(self, body: list[tuple[int, str]]) -> DocumentHeader:
        goal = ""
        domain = ""
        actors: list[ActorDecl] = []
        data: list[str] = []
        for line_no, raw in body:
            stripped = raw.strip()
            km = _KEY_RE.match(stripped)
            if not km:
                self.warn(line_no, 1, "unrecognized header line ignored")
                continue
            key = km.group(1).strip().upper()
            value = (km.group(2) or "").strip()
            if key == "GOAL":
                goal = value
            elif key == "DOMAIN":
                domain = value
            elif key == "DATA":
                data = [part.strip() for part in value.split(";") if part.strip()]
            elif key == "ACTORS":
                actors.extend(self._parse_header_actors(line_no, value))
            else:
                self.warn(line_no, 1, f"unknown key {key}: skipped")
        return DocumentHeader(system_goal=goal, system_domain=domain,
                              actors=tuple(actors), collected_data_types=tuple(data))

    def _parse_header_actors(self, line_no: int, value: str) -> list[ActorDecl]:
        decls: list[ActorDecl] = []
        for entry in value.split(";"):
            entry = entry.strip()
            if not entry:
                continue
            role_token, sep, rest = entry.partition(":")
            role = _HEADER_ROLE_TOKENS.get(role_token.strip().lower()) if sep else None
            if role is None:
                self.warn(line_no, 1,
                          f"malformed actor entry {entry!r} (expected role:name); skipped")
                continue
            name, description = _split_description(rest)
            if not name:
                self.warn(line_no, 1, f"actor entry {entry!r} has an empty name; skipped")
                continue
            decls.append(ActorDecl(name=name, role=role, description=description,
                                   location=SourceLocation(line_no, 1)))
        return decls

    def _parse_scenario(self, scenario_id: str, section_line: int,
                        body: list[tuple[int, str]]) -> Optional[Scenario]:
        title = ""
        arrangement: Optional[ArrangementRef] = None
        actors: list[ActorDecl] = []
        main_flow: Optional[Flow] = None
        alternative_flows: list[Flow] = []
        exception_flows: list[Flow] = []
        seen_labels: set[str] = set()

        mode = "keys"  # keys | actors | flow
        flow_kind: Optional[FlowKind] = None
        flow_label = ""
        flow_origin: Optional[int] = None
        flow_line = section_line
        steps: list[Step] = []
        had_error = False

        def close_flow() -> None:
            nonlocal main_flow, flow_kind, steps, had_error
            if flow_kind is None:
                return
            if not steps:
                self.error(flow_line, 1, "flow declared without steps")
                had_error = True
            elif flow_kind is FlowKind.MAIN:
                if main_flow is not None:
                    self.error(flow_line, 1, "duplicate MAIN FLOW")
                    had_error = True
                else:
                    main_flow = Flow(kind=FlowKind.MAIN, steps=tuple(steps))
            else:
                flow = Flow(kind=flow_kind, label=flow_label,
                            branch_origin=flow_origin, steps=tuple(steps))
                if flow_kind is FlowKind.ALTERNATIVE:
                    alternative_flows.append(flow)
                else:
                    exception_flows.append(flow)
            flow_kind = None
            steps = []

        for line_no, raw in body:
            stripped = raw.strip()
            sm = _STEP_RE.match(stripped)
            if sm and mode == "flow":
                number = int(sm.group(1))
                text = (sm.group(2) or "").strip()
                if not text:
                    self.error(line_no, 1, f"malformed step line: step {number} has no text")
                    had_error = True
                    continue
                if number != len(steps) + 1:
                    self.error(line_no, 1,
                               f"malformed step line: expected step {len(steps) + 1}, got {number}")
                    had_error = True
                    continue
                column = raw.index(text[0], raw.find(".") + 1) + 1
                steps.append(Step(number=number, text=text,
                                  location=SourceLocation(line_no, column)))
                continue

            mm = _MAIN_FLOW_LINE_RE.match(stripped)
            if mm:
                close_flow()
                mode, flow_kind, flow_label, flow_origin, flow_line = "flow", FlowKind.MAIN, "", None, line_no
                if mm.group(1).strip():
                    self.warn(line_no, 1, "text after MAIN FLOW: ignored")
                continue
            bm = _BRANCH_FLOW_LINE_RE.match(stripped)
            if bm:
                close_flow()
                kind = FlowKind.ALTERNATIVE if bm.group(1).lower() == "alternative" else FlowKind.EXCEPTION
                label = bm.group(2) or ""
                if not label:
                    self.error(line_no, 1, f"{bm.group(1).lower()} flow requires a label")
                    had_error = True
                    mode, flow_kind = "flow", None
                    continue
                label = label.upper()
                if label in seen_labels:
                    self.error(line_no, 1, f"duplicate flow label {label}")
                    had_error = True
                    mode, flow_kind = "flow", None
                    continue
                seen_labels.add(label)
                origin = int(bm.group(3)) if bm.group(3) else None
                mode, flow_kind, flow_label, flow_origin, flow_line = "flow", kind, label, origin, line_no
                if bm.group(4).strip():
                    self.warn(line_no, 1, "text after flow header ignored")
                continue

            km = _KEY_RE.match(stripped)
            if km:
                key = km.group(1).strip().upper()
                value = (km.group(2) or "").strip()
                if key == "TITLE":
                    close_flow()
                    mode = "keys"
                    title = value
                    continue
                if key == "ARRANGEMENT":
                    close_flow()
                    mode = "keys"
                    arrangement = self._parse_arrangement(line_no, value)
                    if arrangement is None:
                        had_error = True
                    continue
                if key == "ACTORS":
                    close_flow()
                    mode = "actors"
                    if value:
                        self.warn(line_no, 1, "text after ACTORS: ignored; use role sub-lines")
                    continue
                if key in _ACTOR_BLOCK_KEYS and mode == "actors":
                    role = _ACTOR_BLOCK_KEYS[key]
                    for entry in value.split(";"):
                        entry = entry.strip()
                        if not entry:
                            continue
                        name, description = _split_description(entry)
                        actors.append(ActorDecl(name=name, role=role, description=description,
                                                location=SourceLocation(line_no, 1)))
                    continue
                self.warn(line_no, 1, f"unknown key {key}: skipped")
                continue

            if mode == "flow":
                self.error(line_no, 1, f"malformed step line: {stripped!r}")
                had_error = True
            else:
                self.error(line_no, 1, f"unexpected line in scenario body: {stripped!r}")
                had_error = True

        close_flow()
        if main_flow is None:
            self.error(section_line, 1, f"scenario {scenario_id} is missing MAIN FLOW")
            had_error = True
        if had_error:
            return None
        return Scenario(scenario_id=scenario_id, title=title, arrangement=arrangement,
                        actors=tuple(actors), main_flow=main_flow,
                        alternative_flows=tuple(alternative_flows),
                        exception_flows=tuple(exception_flows),
                        location=SourceLocation(section_line, 1))

    def _parse_arrangement(self, line_no: int, value: str) -> Optional[ArrangementRef]:
        if not value:
            self.error(line_no, 1, "unreadable arrangement field: empty value")
            return None
        am = _ARRANGEMENT_RE.match(value)
        if not am:
            self.error(line_no, 1, f"unreadable arrangement field: {value!r}")
            return None
        arrangement_id = am.group(1).upper()
        name = (am.group(2) or "").strip()
        return ArrangementRef(arrangement_id=arrangement_id, arrangement_name=name)


def _split_description(entry: str) -> tuple[str, str]:
    """Split 'name - description' on the first ' - '; description optional."""
    name, sep, description = entry.partition(" - ")
    return name.strip(), description.strip() if sep else ""


def _merge_headers(first: DocumentHeader, second: DocumentHeader) -> DocumentHeader:
    return DocumentHeader(
        system_goal=second.system_goal or first.system_goal,
        system_domain=second.system_domain or first.system_domain,
        actors=first.actors + second.actors,
        collected_data_types=second.collected_data_types or first.collected_data_types,
    )


def render(doc: ScenarioDocument) -> str:
    """Render the canonical form: HEADER first, scenarios ordered by id,
    upper-case keywords, two-space indents, LF line endings, empty
    fields and empty sections omitted."""
    out: list[str] = ["[HEADER]"]
    header = doc.header
    if header.system_goal:
        out.append(f"GOAL: {header.system_goal}")
    if header.system_domain:
        out.append(f"DOMAIN: {header.system_domain}")
    if header.actors:
        entries = "; ".join(_render_header_actor(a) for a in header.actors)
        out.append(f"ACTORS: {entries}")
    if header.collected_data_types:
        out.append("DATA: " + "; ".join(header.collected_data_types))

    for scenario in sorted(doc.scenarios, key=_scenario_sort_key):
        out.append("")
        out.append(f"[SCENARIO {scenario.scenario_id}]")
        if scenario.title:
            out.append(f"TITLE: {scenario.title}")
        if scenario.arrangement is not None:
            ref = scenario.arrangement
            if ref.arrangement_name:
                out.append(f"ARRANGEMENT: {ref.arrangement_id} ({ref.arrangement_name})")
            else:
                out.append(f"ARRANGEMENT: {ref.arrangement_id}")
        if scenario.actors:
            out.append("ACTORS:")
            for key, role in (("USERS", ActorRole.USER), ("DEVICES", ActorRole.DEVICE),
                              ("SOFTWARE", ActorRole.SOFTWARE_SYSTEM)):
                decls = [a for a in scenario.actors if a.role is role]
                if decls:
                    out.append(f"  {key}: " + "; ".join(_render_actor_entry(a) for a in decls))
        out.append("MAIN FLOW:")
        out.extend(_render_steps(scenario.main_flow))
        for flow in scenario.alternative_flows:
            out.append(_render_flow_header("ALTERNATIVE FLOW", flow))
            out.extend(_render_steps(flow))
        for flow in scenario.exception_flows:
            out.append(_render_flow_header("EXCEPTION FLOW", flow))
            out.extend(_render_steps(flow))
    return "\n".join(out) + "\n"


def _scenario_sort_key(scenario: Scenario) -> tuple[int, str]:
    return int(scenario.scenario_id[2:]), scenario.scenario_id


def _render_header_actor(decl: ActorDecl) -> str:
    return f"{decl.role.value}:{_render_actor_entry(decl)}"


def _render_actor_entry(decl: ActorDecl) -> str:
    if decl.description:
        return f"{decl.name} - {decl.description}"
    return decl.name


def _render_flow_header(keyword: str, flow: Flow) -> str:
    if flow.branch_origin is not None:
        return f"{keyword} {flow.label} (from {flow.branch_origin}):"
    return f"{keyword} {flow.label}:"


def _render_steps(flow: Flow) -> list[str]:
    return [f"  {step.number}. {step.text}" for step in flow.steps]
