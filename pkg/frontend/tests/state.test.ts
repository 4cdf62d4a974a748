import { describe, expect, it } from 'vitest';

import {
  applyAnswerOptimistic,
  closeDraft,
  dismissSuggestion,
  draftComplete,
  draftFromSuggestion,
  draftRejected,
  editDraft,
  gotoQuestion,
  initialQuestionIndex,
  initialState,
  nextQuestion,
  openDraft,
  previousQuestion,
  rollbackAnswer,
} from '../src/state.js';
import type { Finding, Session } from '../src/types.js';

function session(overrides: Partial<Session> = {}): Session {
  return {
    session_id: 'S001',
    artifact_id: 'greenhouse',
    inspector_id: 'ana',
    technique: 'checklist',
    trial: 1,
    phase: 'detection',
    detection_start: '2019-06-01T09:00:00+00:00',
    detection_end: null,
    timer_running: true,
    elapsed_seconds: 0,
    discrepancies: [],
    answers: {},
    ...overrides,
  };
}

const finding: Finding = {
  question_id: 'Q18',
  confidence: 'automatic',
  severity: 'error',
  scenario_id: 'SC01',
  line: 18,
  column: 6,
  message: "vague adverb 'possibly' allows more than one interpretation",
  suggested_defect_type: 'ambiguity',
};

describe('question navigation', () => {
  it('starts at the first unanswered question', () => {
    expect(initialQuestionIndex(session())).toBe(0);
    expect(initialQuestionIndex(session({
      answers: { Q01: 'yes', Q02: 'no', Q03: 'not_applicable' },
    }))).toBe(3);
  });

  it('lands on the last question when everything is answered', () => {
    const answers = Object.fromEntries(Array.from({ length: 32 }, (_, i) => [
      `Q${String(i + 1).padStart(2, '0')}`, 'yes']));
    expect(initialQuestionIndex(session({ answers: answers as Session['answers'] }))).toBe(31);
  });

  it('stays within Q01..Q32', () => {
    let state = initialState(session(), [], 0);
    state = previousQuestion(state);
    expect(state.questionIndex).toBe(0);
    state = gotoQuestion(state, 99);
    expect(state.questionIndex).toBe(31);
    state = nextQuestion(state);
    expect(state.questionIndex).toBe(31);
    state = gotoQuestion(state, -5);
    expect(state.questionIndex).toBe(0);
  });
});

describe('optimistic answers', () => {
  it('applies immediately and rolls back on rejection', () => {
    let state = initialState(session({ answers: { Q01: 'yes' } }), [], 0);
    state = applyAnswerOptimistic(state, 'Q01', 'no');
    expect(state.session.answers.Q01).toBe('no');
    state = rollbackAnswer(state, 'Q01', 'yes', 'phase error');
    expect(state.session.answers.Q01).toBe('yes');
    expect(state.error).toBe('phase error');
  });

  it('rollback removes an answer that did not exist before', () => {
    let state = initialState(session(), [], 0);
    state = applyAnswerOptimistic(state, 'Q05', 'no');
    state = rollbackAnswer(state, 'Q05', undefined, 'rejected');
    expect('Q05' in state.session.answers).toBe(false);
  });
});

describe('discrepancy draft', () => {
  it('prefills the current question and its default defect type', () => {
    let state = initialState(session(), [], 0);
    state = openDraft(state, 'SC01', 'Q18');
    expect(state.draft).not.toBeNull();
    expect(state.draft?.questionId).toBe('Q18');
    expect(state.draft?.defectType).toBe('ambiguity'); // engine default for Q18
    expect(state.draft?.origin).toBe('human');
  });

  it('merges a selected scenario location', () => {
    let state = initialState(session(), [], 0);
    state = openDraft(state, 'SC02', 'Q19', { flowLabel: 'E1', stepNumber: 2 });
    expect(state.draft?.flowLabel).toBe('E1');
    expect(state.draft?.stepNumber).toBe(2);
    expect(state.draft?.defectType).toBe('incorrect_fact');
  });

  it('requires scenario, description, and a location to submit', () => {
    let state = initialState(session(), [], 0);
    state = openDraft(state, 'SC01', 'Q10');
    expect(draftComplete(state.draft)).toBe(false); // no description, no location
    state = editDraft(state, { description: 'roles missing', stepNumber: 1 });
    expect(draftComplete(state.draft)).toBe(true);
    state = editDraft(state, { stepNumber: null, line: 14 });
    expect(draftComplete(state.draft)).toBe(true);
    state = editDraft(state, { line: null });
    expect(draftComplete(state.draft)).toBe(false);
  });

  it('a rejected submission keeps the draft buffer intact', () => {
    let state = initialState(session(), [], 0);
    state = openDraft(state, 'SC01', 'Q10');
    state = editDraft(state, { description: 'typed with care', stepNumber: 3 });
    const rejected = draftRejected(state, '409: discrepancies can only be recorded in detection');
    expect(rejected.draft).toEqual(state.draft);
    expect(rejected.error).toContain('409');
    const closed = closeDraft(rejected);
    expect(closed.draft).toBeNull();
    expect(closed.error).toBeNull();
  });
});

describe('auto-check suggestions', () => {
  it('accepting a finding drafts a discrepancy with origin auto_check', () => {
    let state = initialState(session(), [finding], 0);
    state = draftFromSuggestion(state, finding);
    expect(state.draft?.origin).toBe('auto_check');
    expect(state.draft?.questionId).toBe('Q18');
    expect(state.draft?.defectType).toBe('ambiguity');
    expect(state.draft?.description).toBe(finding.message);
    expect(state.draft?.line).toBe(18);
    expect(draftComplete(state.draft)).toBe(true);
  });

  it('dismissing removes the suggestion only', () => {
    let state = initialState(session(), [finding], 0);
    state = dismissSuggestion(state, finding);
    expect(state.suggestions).toEqual([]);
    expect(state.error).toBeNull();
  });
});
