"""Shared builders and hypothesis strategies."""

from __future__ import annotations

from pathlib import Path

import hypothesis.strategies as st
import pytest

from iotsc.model import (
    ActorDecl,
    ActorRole,
    ArrangementRef,
    DocumentHeader,
    Flow,
    FlowKind,
    Scenario,
    ScenarioDocument,
    Step,
)

DATA_DIR = Path(__file__).parent / "data"
PACKAGE_DATA = Path(__file__).parent.parent / "src" / "iotsc" / "data"


def make_step(number: int, text: str) -> Step:
    return Step(number=number, text=text)


def make_flow(*texts: str, kind: FlowKind = FlowKind.MAIN, label: str = "",
              branch_origin: int | None = None) -> Flow:
    return Flow(kind=kind, label=label, branch_origin=branch_origin,
                steps=tuple(make_step(i + 1, t) for i, t in enumerate(texts)))


def make_scenario(scenario_id: str = "SC01", title: str = "A scenario",
                  arrangement: ArrangementRef | None = ArrangementRef("IIA-01"),
                  actors: tuple[ActorDecl, ...] = (),
                  main: Flow | None = None,
                  alternatives: tuple[Flow, ...] = (),
                  exceptions: tuple[Flow, ...] = ()) -> Scenario:
    return Scenario(
        scenario_id=scenario_id, title=title, arrangement=arrangement, actors=actors,
        main_flow=main if main is not None else make_flow("The sensor sends data."),
        alternative_flows=alternatives, exception_flows=exceptions)


def make_doc(*scenarios: Scenario, header: DocumentHeader | None = None) -> ScenarioDocument:
    if header is None:
        header = DocumentHeader(system_goal="Watch the site", system_domain="farming",
                                collected_data_types=("temperature",))
    if not scenarios:
        scenarios = (make_scenario(),)
    return ScenarioDocument(header=header, scenarios=tuple(scenarios))


# --- hypothesis strategies for canonical documents ----------------------------

_NAME_CHARS = "abcdefghijklmnopqrstuvwxyz0123456789 "
_TEXT_CHARS = _NAME_CHARS + "ABCDEFGHIJKLMNOPQRSTUVWXYZ,.()<>=!?'\""


def _stripped(alphabet: str, min_size: int, max_size: int):
    return (st.text(alphabet=alphabet, min_size=min_size, max_size=max_size)
            .map(str.strip).filter(bool))


def names() -> st.SearchStrategy[str]:
    return _stripped(_NAME_CHARS, 1, 18).filter(lambda s: " - " not in s)


def free_text() -> st.SearchStrategy[str]:
    return _stripped(_TEXT_CHARS, 1, 40).filter(lambda s: " - " not in s)


def optional_text() -> st.SearchStrategy[str]:
    return st.one_of(st.just(""), free_text())


@st.composite
def actor_decls(draw) -> ActorDecl:
    return ActorDecl(
        name=draw(names()),
        role=draw(st.sampled_from(list(ActorRole))),
        description=draw(st.one_of(st.just(""), _stripped(_NAME_CHARS, 1, 24))),
    )


def _grouped(decls: list[ActorDecl]) -> tuple[ActorDecl, ...]:
    order = {ActorRole.USER: 0, ActorRole.DEVICE: 1, ActorRole.SOFTWARE_SYSTEM: 2}
    return tuple(sorted(decls, key=lambda d: order[d.role]))


@st.composite
def flows(draw, kind: FlowKind, label: str = "") -> Flow:
    texts = draw(st.lists(free_text(), min_size=1, max_size=4))
    branch_origin = None
    if kind is not FlowKind.MAIN:
        branch_origin = draw(st.one_of(st.none(), st.integers(min_value=1, max_value=9)))
    return Flow(kind=kind, label=label, branch_origin=branch_origin,
                steps=tuple(Step(number=i + 1, text=t) for i, t in enumerate(texts)))


@st.composite
def scenarios(draw, scenario_id: str) -> Scenario:
    n_alt = draw(st.integers(min_value=0, max_value=2))
    n_exc = draw(st.integers(min_value=0, max_value=2))
    arrangement = draw(st.one_of(
        st.none(),
        st.builds(ArrangementRef,
                  arrangement_id=st.integers(1, 9).map(lambda i: f"IIA-0{i}"),
                  arrangement_name=st.one_of(st.just(""), _stripped(_NAME_CHARS, 1, 20))),
    ))
    return Scenario(
        scenario_id=scenario_id,
        title=draw(optional_text()),
        arrangement=arrangement,
        actors=_grouped(draw(st.lists(actor_decls(), max_size=4))),
        main_flow=draw(flows(FlowKind.MAIN)),
        alternative_flows=tuple(
            draw(flows(FlowKind.ALTERNATIVE, label=f"A{i + 1}")) for i in range(n_alt)),
        exception_flows=tuple(
            draw(flows(FlowKind.EXCEPTION, label=f"E{i + 1}")) for i in range(n_exc)),
    )


@st.composite
def documents(draw) -> ScenarioDocument:
    """Documents already in canonical shape (sorted ids, grouped actors)."""
    ids = sorted(draw(st.sets(st.integers(min_value=1, max_value=30),
                              min_size=1, max_size=3)))
    header = DocumentHeader(
        system_goal=draw(optional_text()),
        system_domain=draw(optional_text()),
        actors=tuple(draw(st.lists(actor_decls(), max_size=3))),
        collected_data_types=tuple(draw(st.lists(names(), max_size=3, unique=True))),
    )
    return ScenarioDocument(
        header=header,
        scenarios=tuple(draw(scenarios(f"SC{i:02d}")) for i in ids),
    )


@pytest.fixture()
def greenhouse_text() -> str:
    return (PACKAGE_DATA / "greenhouse.iotsc").read_text(encoding="utf-8")


@pytest.fixture()
def farm_text() -> str:
    return (PACKAGE_DATA / "smart-farm.iotsc").read_text(encoding="utf-8")
