// Wire types for the /v1/ HTTP API (see SCHEMAS.md at the repo root).

export type Technique = 'ad-hoc' | 'checklist';
export type PhaseName = 'planning' | 'detection' | 'collection' | 'discrimination' | 'follow_up';
export type AnswerValue = 'yes' | 'no' | 'not_applicable';
export type DefectType =
  | 'omission'
  | 'ambiguity'
  | 'inconsistency'
  | 'incorrect_fact'
  | 'extraneous_information';
export type Classification = 'defect' | 'false_positive';

export interface ChecklistQuestion {
  id: string; // Q01..Q32
  part: 'general' | 'specific';
  text: string;
  hint: string;
  facets: string[];
  automation: 'automatic' | 'assisted' | 'manual';
}

export interface ChecklistPayload {
  version: string;
  questions: ChecklistQuestion[];
  arrangements: { id: string; name: string; required_roles: string[] }[];
}

export type DiscrepancyLocation =
  | { kind: 'step'; flow_label: string; step_number: number }
  | { kind: 'line'; line: number; column: number };

export interface Discrepancy {
  discrepancy_id: string;
  session_id: string;
  scenario_id: string;
  location: DiscrepancyLocation;
  description: string;
  defect_type: DefectType;
  origin: 'human' | 'auto_check';
  question_id: string | null;
  duplicate_of: string | null;
  classification: Classification | null;
}

export interface Session {
  session_id: string;
  artifact_id: string;
  inspector_id: string;
  technique: Technique;
  trial: number;
  phase: PhaseName;
  detection_start: string | null;
  detection_end: string | null;
  timer_running: boolean;
  elapsed_seconds: number;
  discrepancies: Discrepancy[];
  answers: Record<string, AnswerValue>;
}

export interface Finding {
  question_id: string;
  confidence: 'automatic' | 'assisted';
  severity: 'error' | 'advisory';
  scenario_id: string | null;
  line: number | null;
  column: number | null;
  message: string;
  suggested_defect_type: DefectType;
}

export interface Collection {
  collection_id: string;
  artifact_id: string;
  session_ids: string[];
  discrepancies: Discrepancy[];
  total: number;
  distinct: number;
  discriminated: boolean;
  real_defects?: number;
}

export interface ReportRow {
  trial: number;
  technique: Technique;
  inspectors: number;
  total_discrepancies: number;
  total_defects: number;
  mean_time_hours: string;
  mean_cost_efficiency: string;
  mean_efficiency: string;
  mean_effectiveness: string;
}

export interface InspectorRow {
  trial: number;
  technique: Technique;
  inspector: string;
  discrepancies: number;
  real_defects: number;
  time_hours: string;
  cost_efficiency: string;
  efficiency: string;
  effectiveness: string;
}

export interface MetricsReport {
  rows: ReportRow[];
  per_inspector: InspectorRow[];
  csv: string;
}

export interface ScenarioSummary {
  id: string;
  path: string;
  ok: boolean;
  scenario_count: number;
}

export interface ScenarioStep {
  number: number;
  text: string;
  line: number | null;
}

export interface ScenarioFlow {
  kind: 'main' | 'alternative' | 'exception';
  label: string;
  branch_origin: number | null;
  steps: ScenarioStep[];
}

export interface ScenarioBody {
  id: string;
  title: string;
  arrangement: { id: string; name: string } | null;
  actors: { name: string; role: string; description: string }[];
  main_flow: ScenarioFlow;
  alternative_flows: ScenarioFlow[];
  exception_flows: ScenarioFlow[];
}

export interface ScenarioDocumentPayload {
  id: string;
  document: {
    source_name: string;
    header: {
      goal: string;
      domain: string;
      actors: { name: string; role: string; description: string }[];
      data_types: string[];
    };
    scenarios: ScenarioBody[];
  };
  source: string;
}
