"""Tests for the scenario document model and its navigation helpers."""

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
    enumerate_actor_terms,
    iter_flows,
    resolve_step_ref,
)

from conftest import make_doc, make_flow, make_scenario


class TestInvariants:
    def test_document_requires_scenarios(self):
        with pytest.raises(ValueError, match="at least one scenario"):
            ScenarioDocument(header=DocumentHeader(), scenarios=())

    def test_document_rejects_duplicate_ids(self):
        with pytest.raises(ValueError, match="unique"):
            make_doc(make_scenario("SC01"), make_scenario("SC01"))

    def test_scenario_id_shape(self):
        with pytest.raises(ValueError, match="'SC' followed by digits"):
            make_scenario("XX01")

    def test_step_numbers_consecutive(self):
        with pytest.raises(ValueError, match="consecutive"):
            Flow(kind=FlowKind.MAIN, steps=(Step(2, "text"),))

    def test_step_text_nonempty(self):
        with pytest.raises(ValueError, match="non-empty"):
            Step(1, "   ")

    def test_main_flow_has_no_label(self):
        with pytest.raises(ValueError, match="no label"):
            Flow(kind=FlowKind.MAIN, label="A1")

    def test_branch_flow_requires_label(self):
        with pytest.raises(ValueError, match="require a label"):
            Flow(kind=FlowKind.ALTERNATIVE, steps=(Step(1, "x"),))

    def test_flow_labels_unique_case_insensitively(self):
        a1 = make_flow("x", kind=FlowKind.ALTERNATIVE, label="A1")
        with pytest.raises(ValueError, match="unique"):
            make_scenario(alternatives=(a1, make_flow("y", kind=FlowKind.ALTERNATIVE, label="A1")))

    def test_arrangement_wellformedness(self):
        assert ArrangementRef("IIA-04").is_wellformed
        assert not ArrangementRef("IIA-10").is_wellformed
        assert not ArrangementRef("AII4").is_wellformed


class TestResolveStepRef:
    @pytest.fixture()
    def doc(self):
        return make_doc(make_scenario(
            "SC01", main=make_flow("first", "second", "third"),
            alternatives=(make_flow("alt one", kind=FlowKind.ALTERNATIVE, label="A1"),)))

    def test_direct_lookup(self, doc):
        step = resolve_step_ref(doc, "SC01", "", 2)
        assert step is not None and step.text == "second"

    def test_out_of_range(self, doc):
        assert resolve_step_ref(doc, "SC01", "", 7) is None
        assert resolve_step_ref(doc, "SC01", "", 0) is None

    def test_unknown_scenario(self, doc):
        assert resolve_step_ref(doc, "SC99", "", 1) is None

    def test_unknown_flow(self, doc):
        assert resolve_step_ref(doc, "SC01", "B9", 1) is None

    def test_labelled_flow_case_insensitive(self, doc):
        step = resolve_step_ref(doc, "SC01", "a1", 1)
        assert step is not None and step.text == "alt one"

    def test_resolves_iff_in_range(self, doc):
        for label, flow in (("", doc.scenarios[0].main_flow),
                            ("A1", doc.scenarios[0].alternative_flows[0])):
            for n in range(1, len(flow.steps) + 1):
                assert resolve_step_ref(doc, "SC01", label, n) is flow.steps[n - 1]
            assert resolve_step_ref(doc, "SC01", label, len(flow.steps) + 1) is None


class TestEnumerateActorTerms:
    def test_union_of_declarations(self):
        doc = make_doc(
            make_scenario(actors=(ActorDecl("collar sensor", ActorRole.DEVICE),)),
            header=DocumentHeader(actors=(ActorDecl("farmer", ActorRole.USER),)))
        assert enumerate_actor_terms(doc) == {
            "farmer": {ActorRole.USER},
            "collar sensor": {ActorRole.DEVICE},
        }

    def test_conflicting_roles_accumulate(self):
        doc = make_doc(
            make_scenario(actors=(ActorDecl("Gateway", ActorRole.SOFTWARE_SYSTEM),)),
            header=DocumentHeader(actors=(ActorDecl("gateway", ActorRole.DEVICE),)))
        assert enumerate_actor_terms(doc) == {
            "gateway": {ActorRole.DEVICE, ActorRole.SOFTWARE_SYSTEM},
        }

    def test_empty_declarations(self):
        doc = make_doc(make_scenario(actors=()), header=DocumentHeader())
        assert enumerate_actor_terms(doc) == {}

    def test_normalization_collapses_whitespace_and_case(self):
        doc = make_doc(make_scenario(actors=(
            ActorDecl("Collar  Sensor", ActorRole.DEVICE),
            ActorDecl("collar sensor", ActorRole.DEVICE),
        )))
        assert enumerate_actor_terms(doc) == {"collar sensor": {ActorRole.DEVICE}}

    def test_size_bounded_by_declarations(self):
        decls = tuple(ActorDecl(f"actor {i}", ActorRole.USER) for i in range(5))
        doc = make_doc(make_scenario(actors=decls))
        assert len(enumerate_actor_terms(doc)) <= len(decls)


def test_iter_flows_yields_each_pair_once():
    scenario = make_scenario(
        alternatives=(make_flow("a", kind=FlowKind.ALTERNATIVE, label="A1"),),
        exceptions=(make_flow("e", kind=FlowKind.EXCEPTION, label="E1"),))
    doc = make_doc(scenario, make_scenario("SC02"))
    pairs = [(s.scenario_id, f.label or "main") for s, f in iter_flows(doc)]
    assert pairs == [("SC01", "main"), ("SC01", "A1"), ("SC01", "E1"), ("SC02", "main")]
    assert len(pairs) == len(set(pairs))
