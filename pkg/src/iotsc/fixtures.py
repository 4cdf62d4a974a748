"""Bundled replication fixtures.

Two study fixtures ship with the tool:

* ``feasibility`` – four groups, two trials (ad-hoc then checklist).
  Group totals and mean times are fixed (ad-hoc 10 defects / 0.924 h,
  checklist 33 / 0.60); the per-group discrepancy, known-defect and time
  values were searched so the per-group metric means land exactly on the
  published summary (ad-hoc CE 2.781 / EFF 0.276 / EFC 0.436; checklist
  CE 14.771 / EFF 0.875 / EFC 0.608) at 3-decimal half-up rounding
  (tools/derive_study_fixtures.py).
* ``observational`` – ten inspectors, three trials. Only the defects and
  time columns are replication targets (15/0.62, 45/0.64, 34/0.60); the
  published per-trial metric columns are internally inconsistent
  (values above 1 for ratio metrics) and are not reproduced.

The discrepancy-bookkeeping builders construct full session/collection
states matching the studies' dedup arithmetic: 45 reported with 7
duplicates leaving 38 distinct, and 124 reported with 16 duplicates
leaving 108 distinct of which 94 are classified real defects.
"""

from __future__ import annotations

from fractions import Fraction

from .catalog import DefectType
from .process import (
    Classification,
    ClassifiedCollection,
    Discrepancy,
    DiscrepancyOrigin,
    InspectionSession,
    MergedCollection,
    Phase,
    StepRef,
    TechniqueTag,
    advance_phase,
    collect,
    discriminate,
    mark_duplicate,
    new_session,
    record_discrepancy,
    start_timer,
    stop_timer,
)
from .metrics import SessionMeasures

STUDY_NAMES = ("feasibility", "observational")

_F = Fraction

# (inspector, trial, technique, discrepancies, real defects, time hours, known defects)
_FEASIBILITY_ROWS = (
    ("G1", 1, TechniqueTag.AD_HOC, 5, 3, _F("0.73"), 3),
    ("G2", 1, TechniqueTag.AD_HOC, 12, 3, _F("1.10"), 6),
    ("G3", 1, TechniqueTag.AD_HOC, 14, 2, _F("0.92"), 13),
    ("G4", 1, TechniqueTag.AD_HOC, 18, 2, _F("0.946"), 22),
    ("G1", 2, TechniqueTag.CHECKLIST, 9, 9, _F("0.42"), 10),
    ("G2", 2, TechniqueTag.CHECKLIST, 8, 8, _F("0.50"), 13),
    ("G3", 2, TechniqueTag.CHECKLIST, 8, 8, _F("0.71"), 17),
    ("G4", 2, TechniqueTag.CHECKLIST, 16, 8, _F("0.77"), 18),
)

# Ten artifacts; the known-defect counts sum to the study's 94 and rotate
# with the cross-checking assignment (trials 1 and 2 review the same
# artifact, trial 3 the next one over).
_OBSERVATIONAL_KNOWN = (9, 10, 11, 8, 12, 9, 10, 11, 9, 5)

_OBSERVATIONAL_DEFECTS = {
    1: (2, 2, 2, 2, 2, 1, 1, 1, 1, 1),      # sum 15
    2: (6, 5, 5, 5, 4, 4, 4, 4, 4, 4),      # sum 45
    3: (4, 4, 4, 4, 4, 3, 3, 3, 3, 2),      # sum 34
}

_OBSERVATIONAL_EXTRA_DISCREPANCIES = {
    1: (2, 1, 3, 0, 2, 1, 2, 3, 1, 2),
    2: (1, 2, 0, 1, 2, 1, 3, 0, 2, 1),
    3: (2, 0, 1, 2, 1, 0, 2, 1, 0, 3),
}

_OBSERVATIONAL_TIMES = {
    1: ("0.70", "0.65", "0.60", "0.55", "0.62", "0.58", "0.66", "0.64", "0.60", "0.60"),
    2: ("0.70", "0.66", "0.62", "0.58", "0.66", "0.62", "0.60", "0.68", "0.64", "0.64"),
    3: ("0.62", "0.58", "0.60", "0.64", "0.56", "0.62", "0.58", "0.60", "0.60", "0.60"),
}

_OBSERVATIONAL_TECHNIQUES = {1: TechniqueTag.AD_HOC, 2: TechniqueTag.CHECKLIST,
                             3: TechniqueTag.CHECKLIST}


def feasibility_measures() -> list[SessionMeasures]:
    return [
        SessionMeasures(inspector_id=inspector, technique=technique, trial=trial,
                        discrepancies=disc, real_defects=defects,
                        time_hours=time, known_defects=known)
        for inspector, trial, technique, disc, defects, time, known in _FEASIBILITY_ROWS
    ]


def observational_measures() -> list[SessionMeasures]:
    measures = []
    for trial in (1, 2, 3):
        technique = _OBSERVATIONAL_TECHNIQUES[trial]
        offset = 1 if trial in (1, 2) else 2
        for i in range(10):
            defects = _OBSERVATIONAL_DEFECTS[trial][i]
            measures.append(SessionMeasures(
                inspector_id=f"P{i + 1:02d}",
                technique=technique,
                trial=trial,
                discrepancies=defects + _OBSERVATIONAL_EXTRA_DISCREPANCIES[trial][i],
                real_defects=defects,
                time_hours=_F(_OBSERVATIONAL_TIMES[trial][i]),
                known_defects=_OBSERVATIONAL_KNOWN[(i + offset) % 10],
            ))
    return measures


def study_measures(name: str) -> list[SessionMeasures]:
    if name == "feasibility":
        return feasibility_measures()
    if name == "observational":
        return observational_measures()
    raise KeyError(f"unknown study fixture {name!r}; expected one of {STUDY_NAMES}")


# --- discrepancy-bookkeeping fixtures ----------------------------------------

_TS = "2019-06-01T09:00:00+00:00"


def _session_with_discrepancies(session_id: str, artifact_id: str, inspector_id: str,
                                count: int, start_index: int) -> InspectionSession:
    session, _ = new_session(session_id, artifact_id, inspector_id,
                             TechniqueTag.CHECKLIST, ts=_TS)
    session, _ = advance_phase(session, Phase.DETECTION, ts=_TS)
    session, _ = start_timer(session, at=_TS)
    for i in range(count):
        entry = Discrepancy(
            discrepancy_id="pending", session_id=session_id,
            scenario_id="SC01", location=StepRef("", (start_index + i) % 7 + 1),
            description=f"issue {start_index + i + 1} reported during detection",
            defect_type=DefectType.OMISSION, origin=DiscrepancyOrigin.HUMAN)
        session, _ = record_discrepancy(session, entry, ts=_TS)
    session, _ = stop_timer(session, at="2019-06-01T09:45:00+00:00")
    session, _ = advance_phase(session, Phase.COLLECTION, ts=_TS)
    return session


def _build_collection(artifact_id: str, counts: list[int], duplicates: int,
                      collection_id: str) -> MergedCollection:
    sessions = [
        _session_with_discrepancies(f"{collection_id}-S{i + 1}", artifact_id,
                                    f"I{i + 1}", count, start_index=sum(counts[:i]))
        for i, count in enumerate(counts)
    ]
    collection, _ = collect(sessions, collection_id, ts=_TS)
    ids = [d.discrepancy_id for d in collection.discrepancies]
    for k in range(duplicates):
        # mark the last `duplicates` entries as duplicates of the first ones
        collection, _ = mark_duplicate(collection, ids[-(k + 1)], ids[k], ts=_TS)
    return collection


def feasibility_collection() -> MergedCollection:
    """45 reported discrepancies, 7 duplicate links, 38 distinct."""
    return _build_collection("greenhouse", [12, 11, 11, 11], 7, "C-FEAS")


def feasibility_classified() -> ClassifiedCollection:
    """Every distinct feasibility discrepancy confirmed as a defect (38 known)."""
    collection = feasibility_collection()
    decisions = {d.discrepancy_id: Classification.DEFECT
                 for d in collection.discrepancies if d.duplicate_of is None}
    classified, _ = discriminate(collection, decisions, ts=_TS)
    return classified


def observational_collection() -> MergedCollection:
    """124 reported discrepancies, 16 duplicate links, 108 distinct."""
    return _build_collection("smart-farm", [13, 13, 13, 13, 12, 12, 12, 12, 12, 12],
                             16, "C-OBS")


def observational_classified() -> ClassifiedCollection:
    """Discrimination confirms 94 of the 108 distinct discrepancies as defects."""
    collection = observational_collection()
    roots = [d.discrepancy_id for d in collection.discrepancies if d.duplicate_of is None]
    decisions = {did: (Classification.DEFECT if i < 94 else Classification.FALSE_POSITIVE)
                 for i, did in enumerate(roots)}
    classified, _ = discriminate(collection, decisions, ts=_TS)
    return classified
