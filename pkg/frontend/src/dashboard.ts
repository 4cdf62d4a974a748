// Read-only metrics dashboard. Every number shown comes from the
// server's report payload, which formats with the same 3-decimal
// half-up rounding as the CSV export -- the dashboard never re-rounds,
// so each cell is byte-equal to the corresponding CSV field.

import type { MetricsReport } from './types.js';

export interface DashboardViewModel {
  empty: boolean;
  summaryHeaders: string[];
  summaryRows: string[][];
  inspectorHeaders: string[];
  inspectorRows: string[][];
}

export const SUMMARY_HEADERS = [
  'trial', 'technique', 'inspectors', 'discrepancies', 'defects',
  'mean time (h)', 'cost-efficiency', 'efficiency', 'effectiveness',
];

export const INSPECTOR_HEADERS = [
  'trial', 'technique', 'inspector', 'discrepancies', 'real defects',
  'time (h)', 'cost-efficiency', 'efficiency', 'effectiveness',
];

export function buildDashboardViewModel(report: MetricsReport): DashboardViewModel {
  return {
    empty: report.rows.length === 0,
    summaryHeaders: SUMMARY_HEADERS,
    summaryRows: report.rows.map((r) => [
      String(r.trial), r.technique, String(r.inspectors),
      String(r.total_discrepancies), String(r.total_defects),
      r.mean_time_hours, r.mean_cost_efficiency, r.mean_efficiency,
      r.mean_effectiveness,
    ]),
    inspectorHeaders: INSPECTOR_HEADERS,
    inspectorRows: report.per_inspector.map((m) => [
      String(m.trial), m.technique, m.inspector, String(m.discrepancies),
      String(m.real_defects), m.time_hours, m.cost_efficiency,
      m.efficiency, m.effectiveness,
    ]),
  };
}

export const EMPTY_STATE_MESSAGE =
  'No discriminated collections yet. Run a session, collect it, and hold ' +
  'the discrimination meeting to see metrics here.';

// Map every rendered cell to its CSV counterpart so tests can assert
// byte-equality between the dashboard and the export.
export interface CsvCrossCheck {
  inspectorCells: string[][]; // from the dashboard
  csvCells: string[][];       // matching fields parsed from the export
}

export function crossCheckAgainstCsv(view: DashboardViewModel,
                                     csv: string): CsvCrossCheck {
  const lines = csv.trim().split('\n').slice(1); // drop header
  const perInspector = lines
    .map((line) => line.split(','))
    .filter((cells) => cells[2] !== 'MEAN');
  const means = lines
    .map((line) => line.split(','))
    .filter((cells) => cells[2] === 'MEAN');
  const csvCells = [
    // inspector rows: trial, technique, inspector, disc, defects, time, ce, eff, efc
    ...perInspector,
    // MEAN rows align with the summary table minus the inspectors column
    ...means,
  ];
  const inspectorCells = [
    ...view.inspectorRows,
    ...view.summaryRows.map((row) => [
      row[0], row[1], 'MEAN', row[3], row[4], row[5], row[6], row[7], row[8]]),
  ];
  return { inspectorCells, csvCells };
}
