"""Replication fixtures: study measures hit the published table values and
the bookkeeping fixtures reproduce the dedup/discrimination arithmetic."""

from fractions import Fraction

import pytest

from iotsc.fixtures import (
    feasibility_classified,
    feasibility_collection,
    feasibility_measures,
    observational_classified,
    observational_collection,
    observational_measures,
    study_measures,
)
from iotsc.metrics import aggregate_report, format_3dp
from iotsc.process import TechniqueTag, known_defects


def mean(values):
    return sum(values, Fraction(0)) / len(values)


class TestFeasibilityMeasures:
    @pytest.fixture()
    def rows(self):
        return {technique: [m for m in feasibility_measures() if m.technique is technique]
                for technique in TechniqueTag}

    def test_defect_totals(self, rows):
        assert sum(m.real_defects for m in rows[TechniqueTag.AD_HOC]) == 10
        assert sum(m.real_defects for m in rows[TechniqueTag.CHECKLIST]) == 33

    def test_mean_times_exact(self, rows):
        assert mean([m.time_hours for m in rows[TechniqueTag.AD_HOC]]) == Fraction("0.924")
        assert mean([m.time_hours for m in rows[TechniqueTag.CHECKLIST]]) == Fraction("0.60")

    def test_metric_means_independent_recomputation(self, rows):
        # oracle: recompute the three ratio means with plain Fractions
        expected = {
            TechniqueTag.AD_HOC: ("2.781", "0.276", "0.436"),
            TechniqueTag.CHECKLIST: ("14.771", "0.875", "0.608"),
        }
        for technique, (ce, eff, efc) in expected.items():
            members = rows[technique]
            assert format_3dp(mean(
                [Fraction(m.real_defects) / m.time_hours for m in members])) == ce
            assert format_3dp(mean(
                [Fraction(m.real_defects, m.discrepancies) for m in members])) == eff
            assert format_3dp(mean(
                [Fraction(m.real_defects, m.known_defects) for m in members])) == efc

    def test_aggregate_report_rows(self, rows):
        report = aggregate_report(feasibility_measures())
        adhoc, checklist = report.rows
        assert (adhoc.total_defects, format_3dp(adhoc.mean_time_hours)) == (10, "0.924")
        assert (checklist.total_defects, format_3dp(checklist.mean_time_hours)) == (33, "0.600")
        assert format_3dp(adhoc.mean_cost_efficiency) == "2.781"
        assert format_3dp(adhoc.mean_efficiency) == "0.276"
        assert format_3dp(adhoc.mean_effectiveness) == "0.436"
        assert format_3dp(checklist.mean_cost_efficiency) == "14.771"
        assert format_3dp(checklist.mean_efficiency) == "0.875"
        assert format_3dp(checklist.mean_effectiveness) == "0.608"


class TestObservationalMeasures:
    def test_defects_and_time_columns(self):
        report = aggregate_report(observational_measures())
        by_trial = {r.trial: r for r in report.rows}
        assert by_trial[1].technique is TechniqueTag.AD_HOC
        assert by_trial[2].technique is TechniqueTag.CHECKLIST
        assert by_trial[3].technique is TechniqueTag.CHECKLIST
        assert (by_trial[1].total_defects, format_3dp(by_trial[1].mean_time_hours)) == (15, "0.620")
        assert (by_trial[2].total_defects, format_3dp(by_trial[2].mean_time_hours)) == (45, "0.640")
        assert (by_trial[3].total_defects, format_3dp(by_trial[3].mean_time_hours)) == (34, "0.600")

    def test_ten_inspectors_per_trial(self):
        report = aggregate_report(observational_measures())
        assert all(r.inspectors == 10 for r in report.rows)

    def test_known_defect_context_sums_to_94(self):
        from iotsc.fixtures import _OBSERVATIONAL_KNOWN
        assert sum(_OBSERVATIONAL_KNOWN) == 94


class TestStudyLookup:
    def test_known_names(self):
        assert study_measures("feasibility") == feasibility_measures()
        assert study_measures("observational") == observational_measures()

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            study_measures("pilot")


class TestBookkeepingFixtures:
    def test_feasibility_45_to_38(self):
        collection = feasibility_collection()
        assert collection.total_count == 45
        assert collection.distinct_count == 38

    def test_feasibility_known_defects_38(self):
        classified = feasibility_classified()
        assert classified.real_defect_count == 38
        assert known_defects([classified]).size == 38

    def test_observational_124_to_108_to_94(self):
        collection = observational_collection()
        assert collection.total_count == 124
        assert collection.distinct_count == 108
        classified = observational_classified()
        assert classified.real_defect_count == 94
        assert known_defects([classified]).size == 94
