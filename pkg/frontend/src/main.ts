// Entry point: a hash router over the three screens (session
// walkthrough, discrimination board, metrics dashboard) plus a home
// screen for picking artifacts and sessions. All state of record lives
// on the server; navigating or reloading rebuilds everything from the
// API.

import { ApiClient, ApiError } from './api.js';
import {
  buildBoardViewModel,
  submittableDecisions,
  toggleDecision,
} from './discriminationBoard.js';
import {
  EMPTY_STATE_MESSAGE,
  buildDashboardViewModel,
} from './dashboard.js';
import { button, clear, el, table } from './dom.js';
import { formatElapsed, liveElapsedSeconds } from './format.js';
import {
  applyAnswerOptimistic,
  closeDraft,
  dismissSuggestion,
  draftFromSuggestion,
  draftRejected,
  gotoQuestion,
  initialState,
  nextQuestion,
  openDraft,
  previousQuestion,
  rollbackAnswer,
  withSession,
} from './state.js';
import type { SessionViewState } from './state.js';
import { buildSessionViewModel, shouldOfferDiscrepancy } from './sessionView.js';
import type {
  AnswerValue,
  ChecklistPayload,
  Classification,
  DefectType,
  Session,
} from './types.js';

const api = new ApiClient('');
const root = document.getElementById('app') as HTMLElement;

const DEFECT_TYPES: DefectType[] = [
  'omission', 'ambiguity', 'inconsistency', 'incorrect_fact',
  'extraneous_information'];

function describeError(error: unknown): string {
  if (error instanceof ApiError) return error.detail;
  return String(error);
}

// --- home --------------------------------------------------------------

async function renderHome(): Promise<void> {
  const [scenarios, sessions, collections] = await Promise.all([
    api.listScenarios(), api.listSessions(), api.listCollections()]);
  clear(root);
  root.append(el('h1', {}, ['Scenario inspections']));

  root.append(el('h2', {}, ['Artifacts']));
  root.append(table(
    ['artifact', 'scenarios', 'parses'],
    scenarios.map((s) => [s.id, String(s.scenario_count), s.ok ? 'yes' : 'NO'])));

  root.append(el('h2', {}, ['Sessions']));
  const sessionRows = el('div', { class: 'list' });
  for (const s of sessions) {
    const row = el('div', { class: 'row' }, [
      `${s.session_id} — ${s.artifact_id} by ${s.inspector_id} ` +
      `(${s.technique}, trial ${s.trial}, ${s.phase}) `]);
    row.append(button('open', () => { window.location.hash = `#/sessions/${s.session_id}`; }));
    sessionRows.append(row);
  }
  root.append(sessionRows);

  const form = el('div', { class: 'row' });
  const artifactSelect = el('select', { id: 'new-artifact' },
    scenarios.map((s) => el('option', { value: s.id }, [s.id])));
  const inspector = el('input', { placeholder: 'inspector id', id: 'new-inspector' });
  const technique = el('select', { id: 'new-technique' }, [
    el('option', { value: 'checklist' }, ['checklist']),
    el('option', { value: 'ad-hoc' }, ['ad-hoc']),
  ]);
  form.append(artifactSelect, inspector, technique, button('new session', async () => {
    if (!inspector.value.trim()) return;
    const created = await api.createSession(
      artifactSelect.value, inspector.value.trim(), technique.value);
    window.location.hash = `#/sessions/${created.session_id}`;
  }));
  root.append(form);

  root.append(el('h2', {}, ['Collections']));
  const collectionRows = el('div', { class: 'list' });
  for (const c of collections) {
    const row = el('div', { class: 'row' }, [
      `${c.collection_id} — ${c.artifact_id}: ${c.distinct} distinct of ${c.total}` +
      (c.discriminated ? ` (${c.real_defects} real defects) ` : ' ')]);
    row.append(button('board', () => {
      window.location.hash = `#/collections/${c.collection_id}`;
    }));
    collectionRows.append(row);
  }
  root.append(collectionRows);

  const detectionSessions = sessions.filter((s) => s.phase === 'detection');
  if (detectionSessions.length > 0) {
    root.append(button('collect all detection sessions of one artifact', async () => {
      const byArtifact = detectionSessions.filter(
        (s) => s.artifact_id === detectionSessions[0].artifact_id);
      const collection = await api.createCollection(byArtifact.map((s) => s.session_id));
      window.location.hash = `#/collections/${collection.collection_id}`;
    }));
  }
  root.append(el('p', {}, []));
  root.append(button('metrics dashboard', () => { window.location.hash = '#/dashboard'; }));
}

// --- session walkthrough -------------------------------------------------

let ticker: number | undefined;

async function renderSession(sessionId: string): Promise<void> {
  const [session, checklist] = await Promise.all([
    api.getSession(sessionId), api.getChecklist()]);
  let suggestions: Awaited<ReturnType<typeof api.checkScenario>> = [];
  try {
    suggestions = await api.checkScenario(session.artifact_id);
  } catch {
    // artifact may not parse; the walkthrough still works
  }
  const accepted = new Set(
    session.discrepancies.filter((d) => d.origin === 'auto_check').map((d) => d.description));
  let state = initialState(
    session, suggestions.filter((f) => !accepted.has(f.message)), Date.now());
  draw(state, checklist);

  function redraw(next: SessionViewState): void {
    state = next;
    draw(state, checklist);
  }

  async function refresh(): Promise<void> {
    redraw(withSession(state, await api.getSession(sessionId), Date.now()));
  }

  function draw(current: SessionViewState, catalog: ChecklistPayload): void {
    const view = buildSessionViewModel(current, catalog.questions, Date.now());
    clear(root);
    root.append(el('h1', {}, [
      `${view.sessionId}: ${view.artifactId} — ${view.inspectorId} (${view.technique})`]));
    const bar = el('div', { class: 'row' }, [
      el('span', { class: 'phase' }, [`phase: ${view.phase}`]),
      el('span', { class: 'timer', id: 'timer' }, [` ⏱ ${view.elapsedDisplay}`]),
    ]);
    if (view.phase === 'planning' || (view.phase === 'detection' && !view.timerRunning)) {
      bar.append(button('start', async () => {
        try {
          redraw(withSession(current, await api.startSession(view.sessionId), Date.now()));
        } catch (error) {
          redraw(draftRejected(current, describeError(error)));
        }
      }));
    }
    if (view.timerRunning) {
      bar.append(button('pause', async () => {
        redraw(withSession(current, await api.stopSession(view.sessionId), Date.now()));
      }));
    }
    bar.append(button('reload from server', refresh));
    bar.append(button('home', () => { window.location.hash = '#/'; }));
    root.append(bar);

    if (view.error) {
      root.append(el('div', { class: 'error' }, [view.error]));
    }

    // overview grid: all 32 questions, answered state at a glance
    const grid = el('div', { class: 'overview' });
    for (const cell of view.overview) {
      const cls = ['cell', cell.answered ? `a-${cell.answer}` : 'unanswered',
                   cell.current ? 'current' : ''].join(' ');
      const node = button(cell.questionId, () => redraw(gotoQuestion(current, cell.index)), cls);
      grid.append(node);
    }
    root.append(grid);

    // the current question, paper order, one at a time
    const q = view.question;
    const card = el('div', { class: 'question' }, [
      el('h2', {}, [view.questionNumber]),
      el('p', { class: 'text' }, [q.text]),
    ]);
    if (q.hint) card.append(el('p', { class: 'hint' }, [`(${q.hint})`]));
    card.append(el('p', { class: 'meta' }, [
      `${q.part} · ${q.automation}` + (q.facets.length ? ` · ${q.facets.join(', ')}` : '')]));

    if (view.technique === 'checklist' && !view.readOnly) {
      const answers = el('div', { class: 'row' });
      for (const value of ['yes', 'no', 'not_applicable'] as AnswerValue[]) {
        const selected = view.selectedAnswer === value ? 'btn selected' : 'btn';
        answers.append(button(value.replace('_', ' '), async () => {
          const previous = current.session.answers[q.id];
          const optimistic = applyAnswerOptimistic(current, q.id, value);
          redraw(optimistic);
          try {
            const confirmed = await api.putAnswer(view.sessionId, q.id, value);
            let next = withSession(optimistic, confirmed, Date.now());
            if (shouldOfferDiscrepancy(value)) {
              next = openDraft(next, firstScenarioId(confirmed), q.id);
            }
            redraw(next);
          } catch (error) {
            redraw(rollbackAnswer(optimistic, q.id, previous, describeError(error)));
          }
        }, selected));
      }
      answers.append(button('log discrepancy', () => {
        redraw(openDraft(current, firstScenarioId(current.session), q.id));
      }));
      card.append(answers);
    } else if (view.selectedAnswer) {
      card.append(el('p', {}, [`answer: ${view.selectedAnswer}`]));
    }
    const nav = el('div', { class: 'row' });
    if (view.canNavigatePrevious) nav.append(button('← previous', () => redraw(previousQuestion(current))));
    if (view.canNavigateNext) nav.append(button('next →', () => redraw(nextQuestion(current))));
    card.append(nav);
    root.append(card);

    // discrepancy draft form
    if (current.draft) {
      const draft = current.draft;
      const form = el('div', { class: 'draft' }, [el('h3', {}, ['Log discrepancy'])]);
      const scenario = el('input', { value: draft.scenarioId, placeholder: 'scenario id' });
      scenario.addEventListener('input', () => { draft.scenarioId = scenario.value; });
      const description = el('textarea', { placeholder: 'what is wrong?' });
      description.value = draft.description;
      description.addEventListener('input', () => { draft.description = description.value; });
      const defect = el('select', {}, DEFECT_TYPES.map((t) =>
        el('option', draft.defectType === t ? { value: t, selected: '' } : { value: t }, [t])));
      defect.addEventListener('change', () => {
        draft.defectType = defect.value as DefectType;
      });
      const step = el('input', {
        placeholder: 'step number',
        value: draft.stepNumber === null ? '' : String(draft.stepNumber),
      });
      step.addEventListener('input', () => {
        draft.stepNumber = step.value ? Number(step.value) : null;
      });
      const line = el('input', {
        placeholder: 'or source line',
        value: draft.line === null ? '' : String(draft.line),
      });
      line.addEventListener('input', () => {
        draft.line = line.value ? Number(line.value) : null;
      });
      form.append(
        el('p', {}, [`question: ${draft.questionId ?? 'none (free report)'} · origin: ${draft.origin}`]),
        scenario, description, defect, step, line,
        button('submit', async () => {
          try {
            const result = await api.addDiscrepancy(view.sessionId, {
              scenario_id: draft.scenarioId,
              description: draft.description,
              defect_type: draft.defectType,
              origin: draft.origin,
              question_id: draft.questionId,
              step_number: draft.stepNumber,
              flow_label: draft.flowLabel,
              line: draft.stepNumber === null ? draft.line : null,
            });
            let next = withSession(current, result.session, Date.now());
            if (draft.origin === 'auto_check') {
              const match = current.suggestions.find((f) => f.message === draft.description);
              if (match) next = dismissSuggestion(next, match);
            }
            redraw(closeDraft(next));
          } catch (error) {
            // phase errors and validation failures keep the draft intact
            redraw(draftRejected(current, describeError(error)));
          }
        }),
        button('cancel', () => redraw(closeDraft(current))),
      );
      root.append(form);
    }

    // auto-check findings as suggested discrepancies
    if (view.suggestions.length > 0) {
      const panel = el('div', { class: 'suggestions' }, [
        el('h3', {}, [`Automated findings (${view.suggestions.length})`])]);
      for (const finding of view.suggestions) {
        const row = el('div', { class: 'row' }, [
          `${finding.question_id} [${finding.confidence}] ` +
          `${finding.scenario_id ?? 'document'}: ${finding.message} `]);
        row.append(
          button('accept', () => redraw(draftFromSuggestion(current, finding))),
          button('dismiss', () => redraw(dismissSuggestion(current, finding))));
        panel.append(row);
      }
      root.append(panel);
    }

    // recorded discrepancies
    root.append(el('h3', {}, [`Discrepancies (${current.session.discrepancies.length})`]));
    root.append(table(
      ['id', 'scenario', 'where', 'question', 'type', 'origin', 'description'],
      current.session.discrepancies.map((d) => [
        d.discrepancy_id, d.scenario_id,
        d.location.kind === 'step'
          ? `${d.location.flow_label || 'main'} step ${d.location.step_number}`
          : `line ${d.location.line}`,
        d.question_id ?? '', d.defect_type, d.origin, d.description])));
  }

  // keep the timer display mirroring the server clock
  if (ticker !== undefined) window.clearInterval(ticker);
  ticker = window.setInterval(() => {
    const node = document.getElementById('timer');
    if (!node) return;
    const elapsed = liveElapsedSeconds(
      state.session.elapsed_seconds, state.session.timer_running,
      state.syncedAtMs, Date.now());
    node.textContent = ` ⏱ ${formatElapsed(elapsed)}`;
  }, 1000);
}

function firstScenarioId(session: Session): string {
  return session.discrepancies[0]?.scenario_id ?? 'SC01';
}

// --- discrimination board -------------------------------------------------

async function renderBoard(collectionId: string): Promise<void> {
  let collection = await api.getCollection(collectionId);
  let decisions: Record<string, Classification> = {};

  function draw(): void {
    const view = buildBoardViewModel(collection, decisions);
    clear(root);
    root.append(el('h1', {}, [
      `Discrimination board — ${view.collectionId} (${view.artifactId})`]));
    root.append(el('p', {}, [
      `${view.total} reported, ${view.distinct} distinct, ` +
      `${view.decided}/${view.distinct} decided`]));
    root.append(button('home', () => { window.location.hash = '#/'; }));

    for (const group of view.groups) {
      const section = el('div', { class: 'group' }, [el('h3', {}, [group.key])]);
      for (const item of group.items) {
        const d = item.discrepancy;
        const row = el('div', { class: item.isDuplicate ? 'row duplicate' : 'row' }, [
          `${d.discrepancy_id} [${d.question_id ?? 'free'}] ${d.description} ` +
          `(${d.defect_type}, ${d.origin})` +
          (item.isDuplicate ? ` — duplicate of ${item.duplicateOf}` : ''),
        ]);
        if (!item.isDuplicate && !view.discriminated) {
          for (const decision of ['defect', 'false_positive'] as Classification[]) {
            const cls = item.decision === decision ? 'btn selected' : 'btn';
            row.append(button(decision.replace('_', ' '), () => {
              decisions = toggleDecision(decisions, d.discrepancy_id, decision);
              draw();
            }, cls));
          }
          if (item.linkTargets.length > 0) {
            const select = el('select', {}, [
              el('option', { value: '' }, ['duplicate of…']),
              ...item.linkTargets.map((t) => el('option', { value: t }, [t])),
            ]);
            select.addEventListener('change', async () => {
              if (!select.value) return;
              collection = await api.markDuplicate(
                view.collectionId, d.discrepancy_id, select.value);
              decisions = submittableDecisions(collection, decisions);
              draw();
            });
            row.append(select);
          }
        } else if (d.classification) {
          row.append(el('span', { class: `cls-${d.classification}` },
            [` → ${d.classification.replace('_', ' ')}`]));
        }
        section.append(row);
      }
      root.append(section);
    }

    if (view.discriminated) {
      root.append(el('p', { class: 'done' }, [
        `Discriminated: ${view.realDefects} real defects of ${view.distinct} distinct.`]));
    } else {
      const submit = button('finish discrimination', async () => {
        collection = await api.discriminate(
          view.collectionId, submittableDecisions(collection, decisions));
        draw();
      });
      if (!view.submitEnabled) submit.setAttribute('disabled', '');
      root.append(submit);
    }
  }

  draw();
}

// --- dashboard -------------------------------------------------------------

async function renderDashboard(): Promise<void> {
  const report = await api.metricsReport();
  const view = buildDashboardViewModel(report);
  clear(root);
  root.append(el('h1', {}, ['Metrics dashboard']));
  root.append(button('home', () => { window.location.hash = '#/'; }));
  if (view.empty) {
    root.append(el('p', { class: 'empty' }, [EMPTY_STATE_MESSAGE]));
    return;
  }
  root.append(el('h2', {}, ['Per trial and technique']));
  root.append(table(view.summaryHeaders, view.summaryRows));
  root.append(el('h2', {}, ['Per inspector']));
  root.append(table(view.inspectorHeaders, view.inspectorRows));
}

// --- router ------------------------------------------------------------

async function route(): Promise<void> {
  if (ticker !== undefined) {
    window.clearInterval(ticker);
    ticker = undefined;
  }
  const hash = window.location.hash || '#/';
  try {
    const sessionMatch = /^#\/sessions\/([\w-]+)$/.exec(hash);
    const boardMatch = /^#\/collections\/([\w-]+)$/.exec(hash);
    if (sessionMatch) {
      await renderSession(sessionMatch[1]);
    } else if (boardMatch) {
      await renderBoard(boardMatch[1]);
    } else if (hash === '#/dashboard') {
      await renderDashboard();
    } else {
      await renderHome();
    }
  } catch (error) {
    clear(root);
    root.append(el('div', { class: 'error' }, [describeError(error)]));
    root.append(button('home', () => { window.location.hash = '#/'; }));
  }
}

window.addEventListener('hashchange', route);
void route();
