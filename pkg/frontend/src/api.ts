// Thin typed client over the /v1/ API. The UI holds no authoritative
// state: every view is reconstructable from these calls alone.

import type {
  AnswerValue,
  ChecklistPayload,
  Classification,
  Collection,
  DefectType,
  Finding,
  MetricsReport,
  ScenarioDocumentPayload,
  ScenarioSummary,
  Session,
} from './types.js';

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`${status}: ${detail}`);
  }

  get isPhaseError(): boolean {
    return this.status === 409;
  }
}

export interface DiscrepancyCreate {
  scenario_id: string;
  description: string;
  defect_type: DefectType;
  origin?: 'human' | 'auto_check';
  question_id?: string | null;
  line?: number | null;
  column?: number | null;
  flow_label?: string | null;
  step_number?: number | null;
}

export class ApiClient {
  constructor(private base: string = '') {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.base}/v1${path}`, {
      method,
      headers: body === undefined ? {} : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const parsed = (await response.json()) as { detail?: unknown };
        if (parsed.detail !== undefined) detail = JSON.stringify(parsed.detail);
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    if (response.headers.get('content-type')?.includes('text/')) {
      return (await response.text()) as T;
    }
    return (await response.json()) as T;
  }

  listScenarios(): Promise<ScenarioSummary[]> {
    return this.request('GET', '/scenarios');
  }

  getScenario(artifactId: string): Promise<ScenarioDocumentPayload> {
    return this.request('GET', `/scenarios/${artifactId}`);
  }

  checkScenario(artifactId: string): Promise<Finding[]> {
    return this.request('POST', `/scenarios/${artifactId}/check`);
  }

  getChecklist(): Promise<ChecklistPayload> {
    return this.request('GET', '/checklist');
  }

  listSessions(): Promise<Session[]> {
    return this.request('GET', '/sessions');
  }

  getSession(sessionId: string): Promise<Session> {
    return this.request('GET', `/sessions/${sessionId}`);
  }

  createSession(artifactId: string, inspectorId: string, technique: string,
                trial = 1): Promise<Session> {
    return this.request('POST', '/sessions', {
      artifact_id: artifactId, inspector_id: inspectorId, technique, trial,
    });
  }

  startSession(sessionId: string, at?: string): Promise<Session> {
    return this.request('POST', `/sessions/${sessionId}/start`, at ? { at } : {});
  }

  stopSession(sessionId: string, at?: string): Promise<Session> {
    return this.request('POST', `/sessions/${sessionId}/stop`, at ? { at } : {});
  }

  putAnswer(sessionId: string, questionId: string, answer: AnswerValue): Promise<Session> {
    return this.request('PUT', `/sessions/${sessionId}/answers/${questionId}`, { answer });
  }

  addDiscrepancy(sessionId: string, body: DiscrepancyCreate):
      Promise<{ discrepancy_id: string; session: Session }> {
    return this.request('POST', `/sessions/${sessionId}/discrepancies`, body);
  }

  listCollections(): Promise<Collection[]> {
    return this.request('GET', '/collections');
  }

  getCollection(collectionId: string): Promise<Collection> {
    return this.request('GET', `/collections/${collectionId}`);
  }

  createCollection(sessionIds: string[]): Promise<Collection> {
    return this.request('POST', '/collections', { session_ids: sessionIds });
  }

  markDuplicate(collectionId: string, duplicateId: string, targetId: string):
      Promise<Collection> {
    return this.request('POST', `/collections/${collectionId}/duplicates`, {
      duplicate_id: duplicateId, target_id: targetId,
    });
  }

  discriminate(collectionId: string, decisions: Record<string, Classification>):
      Promise<Collection> {
    return this.request('POST', `/collections/${collectionId}/discriminate`, { decisions });
  }

  metricsReport(): Promise<MetricsReport> {
    return this.request('GET', '/reports/metrics');
  }

  metricsCsv(): Promise<string> {
    return this.request('GET', '/reports/metrics.csv');
  }
}
