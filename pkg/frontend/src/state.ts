// Client-side session state: the server is authoritative, this module
// only tracks what the page needs between fetches (current question,
// the discrepancy draft, optimistic answers pending confirmation).
// Pure functions over a state record so every transition is testable.

import {
  QUESTION_COUNT,
  clampQuestionIndex,
  defaultDefectType,
  questionIdAt,
} from './defaults.js';
import type { AnswerValue, DefectType, Finding, Session } from './types.js';

export interface DiscrepancyDraft {
  scenarioId: string;
  description: string;
  defectType: DefectType;
  questionId: string | null;
  flowLabel: string;
  stepNumber: number | null;
  line: number | null;
  origin: 'human' | 'auto_check';
}

export interface SessionViewState {
  session: Session;
  syncedAtMs: number;
  questionIndex: number;
  draft: DiscrepancyDraft | null;
  suggestions: Finding[];        // auto-check findings not yet accepted/dismissed
  error: string | null;
}

// The server stores answers, not a cursor; reloading derives the
// walkthrough position as the first unanswered question, which is where
// a sequential walkthrough left off.
export function initialQuestionIndex(session: Session): number {
  for (let i = 0; i < QUESTION_COUNT; i += 1) {
    if (!(questionIdAt(i) in session.answers)) return i;
  }
  return QUESTION_COUNT - 1;
}

export function initialState(session: Session, suggestions: Finding[],
                             nowMs: number): SessionViewState {
  return {
    session,
    syncedAtMs: nowMs,
    questionIndex: initialQuestionIndex(session),
    draft: null,
    suggestions,
    error: null,
  };
}

export function withSession(state: SessionViewState, session: Session,
                            nowMs: number): SessionViewState {
  return { ...state, session, syncedAtMs: nowMs, error: null };
}

export function gotoQuestion(state: SessionViewState, index: number): SessionViewState {
  return { ...state, questionIndex: clampQuestionIndex(index) };
}

export function nextQuestion(state: SessionViewState): SessionViewState {
  return gotoQuestion(state, state.questionIndex + 1);
}

export function previousQuestion(state: SessionViewState): SessionViewState {
  return gotoQuestion(state, state.questionIndex - 1);
}

// Optimistic answer: applied locally at once, confirmed by the server
// response, rolled back (with the error surfaced) on rejection.
export function applyAnswerOptimistic(state: SessionViewState, questionId: string,
                                      answer: AnswerValue): SessionViewState {
  const answers = { ...state.session.answers, [questionId]: answer };
  return { ...state, session: { ...state.session, answers } };
}

export function rollbackAnswer(state: SessionViewState, questionId: string,
                               previous: AnswerValue | undefined,
                               error: string): SessionViewState {
  const answers = { ...state.session.answers };
  if (previous === undefined) {
    delete answers[questionId];
  } else {
    answers[questionId] = previous;
  }
  return { ...state, session: { ...state.session, answers }, error };
}

// "Log discrepancy" opens a draft pre-filled with the current question
// and that question's default defect type; a location the inspector
// selected in the scenario viewer can be merged in.
export function openDraft(state: SessionViewState, scenarioId: string,
                          questionId: string | null,
                          location?: { flowLabel?: string; stepNumber?: number | null;
                                       line?: number | null }): SessionViewState {
  return {
    ...state,
    draft: {
      scenarioId,
      description: '',
      defectType: defaultDefectType(questionId),
      questionId,
      flowLabel: location?.flowLabel ?? '',
      stepNumber: location?.stepNumber ?? null,
      line: location?.line ?? null,
      origin: 'human',
    },
  };
}

export function editDraft(state: SessionViewState,
                          patch: Partial<DiscrepancyDraft>): SessionViewState {
  if (!state.draft) return state;
  return { ...state, draft: { ...state.draft, ...patch } };
}

export function closeDraft(state: SessionViewState): SessionViewState {
  return { ...state, draft: null, error: null };
}

// A rejected submission keeps the draft so nothing the inspector typed
// is lost; only the error banner changes.
export function draftRejected(state: SessionViewState, error: string): SessionViewState {
  return { ...state, error };
}

export function draftFromSuggestion(state: SessionViewState,
                                    finding: Finding): SessionViewState {
  return {
    ...state,
    draft: {
      scenarioId: finding.scenario_id ?? '',
      description: finding.message,
      defectType: finding.suggested_defect_type,
      questionId: finding.question_id,
      flowLabel: '',
      stepNumber: null,
      line: finding.line,
      origin: 'auto_check',
    },
  };
}

export function dismissSuggestion(state: SessionViewState,
                                  finding: Finding): SessionViewState {
  return { ...state, suggestions: state.suggestions.filter((f) => f !== finding) };
}

export function draftComplete(draft: DiscrepancyDraft | null): boolean {
  if (!draft) return false;
  const hasLocation = draft.stepNumber !== null || draft.line !== null;
  return Boolean(draft.scenarioId) && Boolean(draft.description.trim()) && hasLocation;
}
