// Checklist walkthrough view model: one question at a time in catalog
// order, an overview grid of all 32, the live timer, the discrepancy
// draft form, and the auto-check suggestions for the artifact.

import { questionIdAt } from './defaults.js';
import { formatElapsed, liveElapsedSeconds } from './format.js';
import { draftComplete } from './state.js';
import type { SessionViewState } from './state.js';
import type { ChecklistQuestion, Finding } from './types.js';

export interface QuestionCell {
  questionId: string;
  index: number;
  answered: boolean;
  answer: string | null;
  current: boolean;
}

export interface SessionViewModel {
  sessionId: string;
  artifactId: string;
  inspectorId: string;
  technique: string;
  phase: string;
  timerRunning: boolean;
  elapsedSeconds: number;
  elapsedDisplay: string;
  question: ChecklistQuestion;
  questionNumber: string; // e.g. "Q18 (18 of 32)"
  selectedAnswer: string | null;
  overview: QuestionCell[];
  canNavigatePrevious: boolean;
  canNavigateNext: boolean;
  draftOpen: boolean;
  draftSubmittable: boolean;
  suggestions: Finding[];
  error: string | null;
  readOnly: boolean; // true once the session left detection
}

export function buildSessionViewModel(state: SessionViewState,
                                      questions: ChecklistQuestion[],
                                      nowMs: number): SessionViewModel {
  const { session, questionIndex } = state;
  const question = questions[questionIndex];
  const elapsed = liveElapsedSeconds(
    session.elapsed_seconds, session.timer_running, state.syncedAtMs, nowMs);
  const overview: QuestionCell[] = questions.map((q, index) => ({
    questionId: q.id,
    index,
    answered: q.id in session.answers,
    answer: session.answers[q.id] ?? null,
    current: index === questionIndex,
  }));
  return {
    sessionId: session.session_id,
    artifactId: session.artifact_id,
    inspectorId: session.inspector_id,
    technique: session.technique,
    phase: session.phase,
    timerRunning: session.timer_running,
    elapsedSeconds: elapsed,
    elapsedDisplay: formatElapsed(elapsed),
    question,
    questionNumber: `${question.id} (${questionIndex + 1} of ${questions.length})`,
    selectedAnswer: session.answers[question.id] ?? null,
    overview,
    canNavigatePrevious: questionIndex > 0,
    canNavigateNext: questionIndex < questions.length - 1,
    draftOpen: state.draft !== null,
    draftSubmittable: draftComplete(state.draft),
    suggestions: state.suggestions,
    error: state.error,
    readOnly: session.phase !== 'detection' && session.phase !== 'planning',
  };
}

// Answer "No" is the defect-hunting path: the walkthrough offers the
// discrepancy form pre-filled for the current question.
export function shouldOfferDiscrepancy(answer: string): boolean {
  return answer === 'no';
}

export function questionIndexOf(questionId: string): number {
  for (let i = 0; i < 32; i += 1) {
    if (questionIdAt(i) === questionId) return i;
  }
  return 0;
}
