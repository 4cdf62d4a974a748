// Default defect type per checklist question, mirroring the rule
// engine's table so "answer No -> log discrepancy" pre-fills the same
// suggestion the automated checks would make. Questions without an
// engine rule default to omission.

import type { DefectType } from './types.js';

const RULE_DEFAULTS: Record<string, DefectType> = {
  Q01: 'omission',
  Q02: 'omission',
  Q03: 'omission',
  Q04: 'omission',
  Q05: 'omission',
  Q06: 'omission',
  Q07: 'omission',
  Q08: 'omission',
  Q09: 'omission',
  Q10: 'omission',
  Q11: 'omission',
  Q12: 'omission',
  Q15: 'omission',
  Q16: 'inconsistency',
  Q17: 'omission',
  Q18: 'ambiguity',
  Q19: 'incorrect_fact',
  Q20: 'inconsistency',
  Q21: 'inconsistency',
  Q22: 'omission',
  Q23: 'incorrect_fact',
  Q24: 'omission',
  Q26: 'omission',
  Q27: 'omission',
  Q28: 'omission',
  Q29: 'incorrect_fact',
};

export function defaultDefectType(questionId: string | null): DefectType {
  if (questionId && questionId in RULE_DEFAULTS) return RULE_DEFAULTS[questionId];
  return 'omission';
}

export const QUESTION_COUNT = 32;

export function questionIdAt(index: number): string {
  return `Q${(index + 1).toString().padStart(2, '0')}`;
}

export function clampQuestionIndex(index: number): number {
  return Math.min(Math.max(index, 0), QUESTION_COUNT - 1);
}
