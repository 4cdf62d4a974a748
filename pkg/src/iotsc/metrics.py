"""Review metrics: cost-efficiency, efficiency, and effectiveness.

Definitions (per inspector or group):

* cost-efficiency = real defects / inspection time in hours
* efficiency      = real defects / reported discrepancies
* effectiveness   = real defects / known defects in the artifact

Report rows aggregate per (trial, technique): the defects column is the
group total, the time column and the three metrics are arithmetic means
of the per-inspector values (not ratios of sums). All arithmetic is
exact rational; rounding happens only at presentation, 3 decimals,
half-up.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence

from .process import TechniqueTag


class UndefinedMetricError(ValueError):
    """A metric with a zero denominator has no value."""


def as_fraction(value: int | float | str | Fraction) -> Fraction:
    """Exact conversion; floats go through their decimal string form so
    0.62 means 62/100, not the binary float."""
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def cost_efficiency(real_defects: int, time_hours: int | float | str | Fraction) -> Fraction:
    t = as_fraction(time_hours)
    if t == 0:
        raise UndefinedMetricError("cost-efficiency is undefined for zero inspection time")
    if t < 0 or real_defects < 0:
        raise ValueError("counts and times must be non-negative")
    return Fraction(real_defects) / t


def efficiency(real_defects: int, discrepancies: int) -> Fraction:
    if discrepancies == 0:
        raise UndefinedMetricError("efficiency is undefined without discrepancies")
    if real_defects < 0 or discrepancies < 0 or real_defects > discrepancies:
        raise ValueError("need 0 <= real_defects <= discrepancies")
    return Fraction(real_defects, discrepancies)


def effectiveness(real_defects: int, known_defects: int) -> Fraction:
    if known_defects == 0:
        raise UndefinedMetricError("effectiveness is undefined without known defects")
    if real_defects < 0 or known_defects < 0 or real_defects > known_defects:
        raise ValueError("need 0 <= real_defects <= known_defects")
    return Fraction(real_defects, known_defects)


@dataclass(frozen=True)
class SessionMeasures:
    inspector_id: str
    technique: TechniqueTag
    trial: int
    discrepancies: int
    real_defects: int
    time_hours: Fraction
    known_defects: int

    def __post_init__(self) -> None:
        if not isinstance(self.time_hours, Rational):
            object.__setattr__(self, "time_hours", as_fraction(self.time_hours))
        if self.real_defects > self.discrepancies:
            raise ValueError("real defects cannot exceed reported discrepancies")
        if self.real_defects > self.known_defects:
            raise ValueError("real defects cannot exceed known defects")
        if min(self.discrepancies, self.real_defects, self.known_defects) < 0 \
                or self.time_hours < 0:
            raise ValueError("measures must be non-negative")

    @property
    def cost_efficiency(self) -> Optional[Fraction]:
        return None if self.time_hours == 0 else Fraction(self.real_defects) / self.time_hours

    @property
    def efficiency(self) -> Optional[Fraction]:
        return None if self.discrepancies == 0 else Fraction(self.real_defects, self.discrepancies)

    @property
    def effectiveness(self) -> Optional[Fraction]:
        return None if self.known_defects == 0 else Fraction(self.real_defects, self.known_defects)


@dataclass(frozen=True)
class ReportRow:
    trial: int
    technique: TechniqueTag
    inspectors: int
    total_discrepancies: int
    total_defects: int
    mean_time_hours: Fraction
    mean_cost_efficiency: Optional[Fraction]
    mean_efficiency: Optional[Fraction]
    mean_effectiveness: Optional[Fraction]


@dataclass(frozen=True)
class MetricsReport:
    rows: tuple[ReportRow, ...]
    per_inspector: tuple[SessionMeasures, ...]


def aggregate_report(measures: Sequence[SessionMeasures]) -> MetricsReport:
    """Aggregate per-(trial, technique); deterministic and permutation-invariant.

    Undefined per-inspector metrics (zero denominators) are skipped when
    averaging; a mean over no defined values is itself undefined and
    rendered blank.
    """
    # total ordering key: permutation invariance must hold even when a
    # (trial, technique, inspector) triple appears more than once
    ordered = sorted(measures, key=lambda m: (
        m.trial, m.technique.value, m.inspector_id, m.discrepancies,
        m.real_defects, m.time_hours, m.known_defects))
    groups: dict[tuple[int, TechniqueTag], list[SessionMeasures]] = {}
    for m in ordered:
        groups.setdefault((m.trial, m.technique), []).append(m)
    rows = []
    for (trial, technique), members in sorted(
            groups.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        rows.append(ReportRow(
            trial=trial,
            technique=technique,
            inspectors=len(members),
            total_discrepancies=sum(m.discrepancies for m in members),
            total_defects=sum(m.real_defects for m in members),
            mean_time_hours=_mean([m.time_hours for m in members]),
            mean_cost_efficiency=_mean_defined([m.cost_efficiency for m in members]),
            mean_efficiency=_mean_defined([m.efficiency for m in members]),
            mean_effectiveness=_mean_defined([m.effectiveness for m in members]),
        ))
    return MetricsReport(rows=tuple(rows), per_inspector=tuple(ordered))


def _mean(values: Sequence[Fraction]) -> Fraction:
    return sum(values, Fraction(0)) / len(values)


def _mean_defined(values: Sequence[Optional[Fraction]]) -> Optional[Fraction]:
    defined = [v for v in values if v is not None]
    if not defined:
        return None
    return _mean(defined)


def round_half_up_3dp(value: Fraction) -> Fraction:
    """Exact half-up rounding to 3 decimal places."""
    scaled = value * 1000
    if scaled >= 0:
        millis = (2 * scaled.numerator + scaled.denominator) // (2 * scaled.denominator)
    else:
        millis = -((2 * -scaled.numerator + scaled.denominator) // (2 * scaled.denominator))
    return Fraction(millis, 1000)


def format_3dp(value: Optional[Fraction]) -> str:
    """Blank for undefined; otherwise fixed 3-decimal text (half-up)."""
    if value is None:
        return ""
    millis = int(round_half_up_3dp(value) * 1000)
    sign = "-" if millis < 0 else ""
    millis = abs(millis)
    return f"{sign}{millis // 1000}.{millis % 1000:03d}"


CSV_HEADER = ("trial,technique,inspector,discrepancies,real_defects,"
              "time_hours,cost_efficiency,efficiency,effectiveness")

MEAN_INSPECTOR = "MEAN"


def report_to_csv(report: MetricsReport) -> str:
    """Per-inspector rows followed by one MEAN row per (trial, technique).

    The MEAN row mirrors the summary-table shape: counts are group
    totals, time and the three metrics are per-inspector means.
    """
    lines = [CSV_HEADER]
    for row in report.rows:
        members = [m for m in report.per_inspector
                   if m.trial == row.trial and m.technique == row.technique]
        for m in members:
            lines.append(",".join([
                str(m.trial), m.technique.value, m.inspector_id,
                str(m.discrepancies), str(m.real_defects),
                format_3dp(m.time_hours),
                format_3dp(m.cost_efficiency),
                format_3dp(m.efficiency),
                format_3dp(m.effectiveness),
            ]))
        lines.append(",".join([
            str(row.trial), row.technique.value, MEAN_INSPECTOR,
            str(row.total_discrepancies), str(row.total_defects),
            format_3dp(row.mean_time_hours),
            format_3dp(row.mean_cost_efficiency),
            format_3dp(row.mean_efficiency),
            format_3dp(row.mean_effectiveness),
        ]))
    return "\n".join(lines) + "\n"


def render_table(report: MetricsReport) -> str:
    """Fixed-width summary table, one row per (trial, technique)."""
    headers = ("trial", "technique", "defects", "time_h", "cost_eff", "efficiency",
               "effectiveness")
    body = [(str(r.trial), r.technique.value, str(r.total_defects),
             format_3dp(r.mean_time_hours), format_3dp(r.mean_cost_efficiency),
             format_3dp(r.mean_efficiency), format_3dp(r.mean_effectiveness))
            for r in report.rows]
    widths = [max(len(h), *(len(row[i]) for row in body)) if body else len(h)
              for i, h in enumerate(headers)]
    def fmt(cells: Sequence[str]) -> str:
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    lines = [fmt(headers), fmt(tuple("-" * w for w in widths))]
    lines.extend(fmt(row) for row in body)
    return "\n".join(lines) + "\n"
