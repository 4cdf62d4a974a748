"""Inspection process tests: planner, phases, event sourcing, dedup,
discrimination, and known-defect aggregation."""

import random

import pytest

from iotsc.catalog import DefectType
from iotsc.model import SourceLocation
from iotsc.process import (
    Answer,
    Classification,
    Discrepancy,
    DiscrepancyOrigin,
    Event,
    EventLog,
    Phase,
    PhaseError,
    PlanningError,
    ProcessError,
    StepRef,
    TechniqueTag,
    advance_phase,
    collect,
    discriminate,
    known_defects,
    mark_duplicate,
    new_session,
    plan_assignments,
    record_answer,
    record_discrepancy,
    replay_session,
    start_timer,
    stop_timer,
    suggest_duplicates,
)

T0 = "2019-06-01T09:00:00+00:00"
T1 = "2019-06-01T09:30:00+00:00"
T2 = "2019-06-01T10:00:00+00:00"


def entry(session_id="S1", scenario="SC01", description="missing actor",
          step=1, question=None) -> Discrepancy:
    return Discrepancy(
        discrepancy_id="pending", session_id=session_id, scenario_id=scenario,
        location=StepRef("", step), description=description,
        defect_type=DefectType.OMISSION, origin=DiscrepancyOrigin.HUMAN,
        question_id=question)


def detection_session(session_id="S1", artifact="greenhouse", inspector="I1",
                      technique=TechniqueTag.CHECKLIST):
    session, _ = new_session(session_id, artifact, inspector, technique, ts=T0)
    session, _ = advance_phase(session, Phase.DETECTION, ts=T0)
    return session


class TestPlanner:
    def test_reference_four_group_rotation(self):
        plan = plan_assignments(
            ["G1", "G2", "G3", "G4"],
            {g: f"{g}-scenarios" for g in ["G1", "G2", "G3", "G4"]},
            [TechniqueTag.AD_HOC, TechniqueTag.CHECKLIST])
        trial1, trial2 = plan.trials
        assert trial1.technique is TechniqueTag.AD_HOC
        assert trial1.assignments == {
            "G1": "G2-scenarios", "G2": "G1-scenarios",
            "G3": "G4-scenarios", "G4": "G3-scenarios"}
        assert trial2.technique is TechniqueTag.CHECKLIST
        assert trial2.assignments == {
            "G1": "G3-scenarios", "G2": "G4-scenarios",
            "G3": "G1-scenarios", "G4": "G2-scenarios"}

    def test_single_inspector_rejected(self):
        with pytest.raises(PlanningError, match="at least two"):
            plan_assignments(["solo"], {"solo": "a"}, [TechniqueTag.AD_HOC])

    @pytest.mark.parametrize("n,trials", [(n, t) for n in range(2, 11)
                                          for t in range(1, 4) if t <= n - 1])
    def test_derangement_and_no_repeats(self, n, trials):
        inspectors = [f"P{i}" for i in range(n)]
        artifacts = {p: f"A-{p}" for p in inspectors}
        plan = plan_assignments(inspectors, artifacts,
                                [TechniqueTag.CHECKLIST] * trials)
        seen = set()
        for trial in plan.trials:
            # brute-force oracle: injective, self-avoiding, no repetition
            assert sorted(trial.assignments) == sorted(inspectors)
            assigned = list(trial.assignments.values())
            assert len(set(assigned)) == n
            for inspector in inspectors:
                assert trial.assignments[inspector] != artifacts[inspector]
                pair = (inspector, trial.assignments[inspector])
                assert pair not in seen
                seen.add(pair)

    def test_infeasible_trials_rejected(self):
        with pytest.raises(PlanningError, match="no assignment"):
            plan_assignments(["a", "b"], {"a": "A", "b": "B"},
                             [TechniqueTag.AD_HOC, TechniqueTag.CHECKLIST])


class TestSessionLifecycle:
    def test_record_appends_with_fresh_id(self):
        session = detection_session()
        session, _ = record_discrepancy(session, entry(), ts=T0)
        assert len(session.discrepancies) == 1
        assert session.discrepancies[0].discrepancy_id == "S1-D001"

    def test_origin_preserved(self):
        session = detection_session()
        auto = Discrepancy(
            discrepancy_id="pending", session_id="S1", scenario_id="SC01",
            location=SourceLocation(12, 3), description="vague adverb found",
            defect_type=DefectType.AMBIGUITY, origin=DiscrepancyOrigin.AUTO_CHECK,
            question_id="Q18")
        session, _ = record_discrepancy(session, auto, ts=T0)
        stored = session.discrepancies[0]
        assert stored.origin is DiscrepancyOrigin.AUTO_CHECK
        assert stored.question_id == "Q18"
        assert stored.location == SourceLocation(12, 3)

    def test_record_outside_detection_is_phase_error(self):
        session = detection_session()
        session, _ = advance_phase(session, Phase.COLLECTION, ts=T0)
        with pytest.raises(PhaseError, match="detection"):
            record_discrepancy(session, entry())

    def test_phase_must_advance_in_order(self):
        session, _ = new_session("S1", "a", "i", TechniqueTag.AD_HOC, ts=T0)
        with pytest.raises(PhaseError):
            advance_phase(session, Phase.COLLECTION)
        with pytest.raises(PhaseError):
            advance_phase(session, Phase.PLANNING)

    def test_timer_accumulates_and_reports_hours(self):
        session = detection_session()
        session, _ = start_timer(session, at=T0)
        session, _ = stop_timer(session, at=T1)
        session, _ = start_timer(session, at=T1)
        session, _ = stop_timer(session, at=T2)
        assert session.elapsed_us == 3600 * 1_000_000
        assert session.time_hours == 1
        assert session.detection_start == T0
        assert session.detection_end == T2

    def test_stop_before_start_rejected(self):
        session = detection_session()
        session, _ = start_timer(session, at=T1)
        with pytest.raises(PhaseError, match="precedes"):
            stop_timer(session, at=T0)

    def test_cannot_leave_detection_with_running_timer(self):
        session = detection_session()
        session, _ = start_timer(session, at=T0)
        with pytest.raises(PhaseError, match="stop the detection timer"):
            advance_phase(session, Phase.COLLECTION)

    def test_answers_only_for_checklist_sessions(self):
        adhoc = detection_session(technique=TechniqueTag.AD_HOC)
        with pytest.raises(PhaseError, match="checklist-guided"):
            record_answer(adhoc, "Q01", Answer.YES)
        guided = detection_session()
        guided, _ = record_answer(guided, "Q01", Answer.NOT_APPLICABLE, ts=T0)
        assert guided.checklist_answers == {"Q01": Answer.NOT_APPLICABLE}


def make_collection(counts, artifact="greenhouse", prefix="S"):
    sessions = []
    offset = 0
    for i, count in enumerate(counts):
        session = detection_session(f"{prefix}{i + 1}", artifact, f"I{i + 1}")
        for k in range(count):
            session, _ = record_discrepancy(
                session, entry(scenario="SC01", step=(offset + k) % 9 + 1,
                               description=f"problem number {offset + k}"), ts=T0)
        session, _ = advance_phase(session, Phase.COLLECTION, ts=T0)
        sessions.append(session)
        offset += count
    collection, _ = collect(sessions, f"C-{artifact}", ts=T0)
    return collection


class TestCollection:
    def test_merge_keeps_session_order(self):
        collection = make_collection([2, 3])
        ids = [d.discrepancy_id for d in collection.discrepancies]
        assert ids == ["S1-D001", "S1-D002", "S2-D001", "S2-D002", "S2-D003"]

    def test_mixed_artifacts_rejected(self):
        s1 = detection_session("S1", "greenhouse")
        s2 = detection_session("S2", "smart-farm")
        s1, _ = advance_phase(s1, Phase.COLLECTION, ts=T0)
        s2, _ = advance_phase(s2, Phase.COLLECTION, ts=T0)
        with pytest.raises(Exception, match="different artifacts"):
            collect([s1, s2], "C1")

    def test_collect_requires_collection_phase(self):
        s1 = detection_session("S1")
        with pytest.raises(PhaseError, match="not reached collection"):
            collect([s1], "C1")

    def test_feasibility_dedup_45_to_38(self):
        collection = make_collection([12, 11, 11, 11])
        assert collection.total_count == 45
        ids = [d.discrepancy_id for d in collection.discrepancies]
        for k in range(7):
            collection, _ = mark_duplicate(collection, ids[-(k + 1)], ids[k], ts=T0)
        assert collection.distinct_count == 38

    def test_observational_dedup_124_to_108(self):
        collection = make_collection([13, 13, 13, 13, 12, 12, 12, 12, 12, 12])
        assert collection.total_count == 124
        ids = [d.discrepancy_id for d in collection.discrepancies]
        for k in range(16):
            collection, _ = mark_duplicate(collection, ids[-(k + 1)], ids[k], ts=T0)
        assert collection.distinct_count == 108

    def test_no_duplicates_identity(self):
        collection = make_collection([4, 4])
        assert collection.distinct_count == collection.total_count == 8

    def test_duplicate_links_normalize_to_roots(self):
        collection = make_collection([5])
        ids = [d.discrepancy_id for d in collection.discrepancies]
        collection, _ = mark_duplicate(collection, ids[2], ids[0], ts=T0)
        # linking to a duplicate re-targets to its root
        collection, _ = mark_duplicate(collection, ids[4], ids[2], ts=T0)
        assert collection.entry(ids[4]).duplicate_of == ids[0]
        # re-marking the middle of a chain re-points children
        depths = [d.duplicate_of for d in collection.discrepancies]
        assert all(t is None or collection.entry(t).duplicate_of is None for t in depths)

    def test_circular_link_rejected(self):
        collection = make_collection([3])
        ids = [d.discrepancy_id for d in collection.discrepancies]
        collection, _ = mark_duplicate(collection, ids[2], ids[0], ts=T0)
        with pytest.raises(Exception, match="circular"):
            mark_duplicate(collection, ids[0], ids[2], ts=T0)

    def test_link_must_point_backwards(self):
        collection = make_collection([3])
        ids = [d.discrepancy_id for d in collection.discrepancies]
        with pytest.raises(Exception, match="earlier"):
            mark_duplicate(collection, ids[0], ids[2], ts=T0)


class TestDiscrimination:
    def test_real_defect_count(self):
        collection = make_collection([4])
        roots = [d.discrepancy_id for d in collection.discrepancies]
        decisions = {roots[0]: Classification.DEFECT,
                     roots[1]: Classification.DEFECT,
                     roots[2]: Classification.FALSE_POSITIVE,
                     roots[3]: Classification.DEFECT}
        classified, _ = discriminate(collection, decisions, ts=T0)
        assert classified.real_defect_count == 3

    def test_all_false_positive(self):
        collection = make_collection([3])
        decisions = {d.discrepancy_id: Classification.FALSE_POSITIVE
                     for d in collection.discrepancies}
        classified, _ = discriminate(collection, decisions, ts=T0)
        assert classified.real_defect_count == 0

    def test_missing_decision_names_the_id(self):
        collection = make_collection([3])
        ids = [d.discrepancy_id for d in collection.discrepancies]
        decisions = {ids[0]: Classification.DEFECT, ids[2]: Classification.DEFECT}
        with pytest.raises(Exception, match=ids[1]):
            discriminate(collection, decisions)

    def test_duplicates_inherit_root_classification(self):
        collection = make_collection([4])
        ids = [d.discrepancy_id for d in collection.discrepancies]
        collection, _ = mark_duplicate(collection, ids[3], ids[0], ts=T0)
        decisions = {ids[0]: Classification.DEFECT,
                     ids[1]: Classification.FALSE_POSITIVE,
                     ids[2]: Classification.DEFECT}
        classified, _ = discriminate(collection, decisions, ts=T0)
        assert classified.entry(ids[3]).classification is Classification.DEFECT

    def test_decision_for_duplicate_rejected(self):
        collection = make_collection([3])
        ids = [d.discrepancy_id for d in collection.discrepancies]
        collection, _ = mark_duplicate(collection, ids[2], ids[0], ts=T0)
        decisions = {i: Classification.DEFECT for i in ids}
        with pytest.raises(Exception, match="duplicate"):
            discriminate(collection, decisions)


class TestKnownDefects:
    def _classified(self, counts, artifact, defects):
        collection = make_collection(counts, artifact=artifact, prefix=f"{artifact}-S")
        roots = [d.discrepancy_id for d in collection.discrepancies]
        decisions = {did: (Classification.DEFECT if i < defects
                           else Classification.FALSE_POSITIVE)
                     for i, did in enumerate(roots)}
        classified, _ = discriminate(collection, decisions, ts=T0)
        return classified

    def test_union_size(self):
        a = self._classified([3, 3], "greenhouse", 5)
        b = self._classified([4], "smart-farm", 4)
        assert known_defects([a, b]).size == 9
        assert known_defects([a, b]).for_artifact("greenhouse") == 5

    def test_idempotent_union(self):
        a = self._classified([3, 3], "greenhouse", 5)
        assert known_defects([a, a]).size == known_defects([a]).size == 5

    def test_order_invariant(self):
        a = self._classified([3], "greenhouse", 3)
        b = self._classified([2], "smart-farm", 1)
        assert known_defects([a, b]) == known_defects([b, a])

    def test_undiscriminated_input_rejected(self):
        merged = make_collection([2])
        with pytest.raises(PhaseError, match="not discriminated"):
            known_defects([merged])


class TestSuggestions:
    def test_shared_step_ref_suggested(self):
        s = detection_session()
        s, _ = record_discrepancy(s, entry(step=3, description="actor missing here"), ts=T0)
        s, _ = record_discrepancy(s, entry(step=3, description="completely different words"), ts=T0)
        s, _ = record_discrepancy(s, entry(step=5, description="unrelated"), ts=T0)
        s, _ = advance_phase(s, Phase.COLLECTION, ts=T0)
        collection, _ = collect([s], "C1", ts=T0)
        assert ("S1-D001", "S1-D002") in suggest_duplicates(collection)
        assert ("S1-D001", "S1-D003") not in suggest_duplicates(collection)

    def test_jaccard_threshold(self):
        s = detection_session()
        s, _ = record_discrepancy(s, entry(step=1, question="Q18",
                                           description="vague adverb probably in step"), ts=T0)
        s, _ = record_discrepancy(s, entry(step=2, question="Q18",
                                           description="vague adverb probably in step"), ts=T0)
        s, _ = record_discrepancy(s, entry(step=4, question="Q18",
                                           description="nothing shared at all xyz"), ts=T0)
        s, _ = advance_phase(s, Phase.COLLECTION, ts=T0)
        collection, _ = collect([s], "C1", ts=T0)
        pairs = suggest_duplicates(collection)
        assert ("S1-D001", "S1-D002") in pairs
        assert ("S1-D001", "S1-D003") not in pairs
        assert pairs == suggest_duplicates(collection)  # deterministic


class TestEventSourcing:
    def test_replay_matches_live_state(self):
        events = []
        session, e = new_session("S1", "greenhouse", "I1", TechniqueTag.CHECKLIST, ts=T0)
        events.append(e)
        session, e = advance_phase(session, Phase.DETECTION, ts=T0)
        events.append(e)
        session, e = start_timer(session, at=T0)
        events.append(e)
        session, e = record_discrepancy(session, entry(), ts=T0)
        events.append(e)
        session, e = record_answer(session, "Q05", Answer.NO, ts=T0)
        events.append(e)
        session, e = stop_timer(session, at=T1)
        events.append(e)
        assert replay_session(events) == session

    def test_event_log_round_trip(self, tmp_path):
        log = EventLog(tmp_path / "S1.log")
        session, e = new_session("S1", "a", "i", TechniqueTag.AD_HOC, ts=T0)
        log.append(e)
        session, e = advance_phase(session, Phase.DETECTION, ts=T0)
        log.append(e)
        assert replay_session(log.read()) == session

    def test_torn_tail_dropped(self, tmp_path):
        log = EventLog(tmp_path / "S1.log")
        session, e = new_session("S1", "a", "i", TechniqueTag.AD_HOC, ts=T0)
        log.append(e)
        with open(log.path, "a", encoding="utf-8") as fh:
            fh.write('{"seq": 2, "ts": "x", "ki')  # crash mid-append
        events = log.read()
        assert [e.seq for e in events] == [1]
        assert replay_session(events).session_id == "S1"

    def test_corrupt_middle_reported_with_sequence(self, tmp_path):
        log = EventLog(tmp_path / "S1.log")
        session, e1 = new_session("S1", "a", "i", TechniqueTag.AD_HOC, ts=T0)
        session, e2 = advance_phase(session, Phase.DETECTION, ts=T0)
        log.append(e1)
        with open(log.path, "a", encoding="utf-8") as fh:
            fh.write("garbage line\n")
        log.append(e2)
        with pytest.raises(ProcessError, match="after sequence 1"):
            log.read()

    def test_sequence_gap_detected(self, tmp_path):
        log = EventLog(tmp_path / "S1.log")
        _, e1 = new_session("S1", "a", "i", TechniqueTag.AD_HOC, ts=T0)
        log.append(e1)
        log.append(Event(seq=5, ts=T0, kind="phase_advanced", payload={"to": "detection"}))
        with pytest.raises(ProcessError, match="sequence gap"):
            log.read()


class TestRandomizedSequences:
    """Randomized command sequences: phases never regress, invalid commands
    are rejected without corrupting state, and replay equals live state."""

    COMMANDS = ("advance", "start", "stop", "record", "answer")

    def run_sequence(self, seed: int) -> None:
        rng = random.Random(seed)
        events = []
        session, e = new_session(f"S{seed}", "artifact", "I1",
                                 rng.choice(list(TechniqueTag)), ts=T0)
        events.append(e)
        observed_phases = [session.phase]
        clock = [0]

        def tick() -> str:
            clock[0] += 60
            return f"2019-06-01T09:{clock[0] // 60:02d}:00+00:00"

        for _ in range(rng.randint(3, 25)):
            command = rng.choice(self.COMMANDS)
            try:
                if command == "advance":
                    target = rng.choice(list(Phase))
                    session, e = advance_phase(session, target, ts=T0)
                elif command == "start":
                    session, e = start_timer(session, at=tick())
                elif command == "stop":
                    session, e = stop_timer(session, at=tick())
                elif command == "record":
                    session, e = record_discrepancy(session, entry(
                        session_id=session.session_id,
                        description=f"issue {rng.randint(1, 9)}"), ts=T0)
                else:
                    session, e = record_answer(
                        session, f"Q{rng.randint(1, 32):02d}", rng.choice(list(Answer)), ts=T0)
                events.append(e)
            except (PhaseError, ProcessError, ValueError):
                pass  # rejected commands must leave no trace
            observed_phases.append(session.phase)

        indices = [list(Phase).index(p) for p in observed_phases]
        assert indices == sorted(indices), "phase regressed"
        assert replay_session(events) == session

    @pytest.mark.parametrize("seed", range(200))
    def test_random_sequences(self, seed):
        self.run_sequence(seed)
