// Typed client for the lab service. Every mutating call is appended to an
// auditable command log; reads are not interventions and are not logged.

import type {
  LesionRequest,
  ModelInfo,
  ModelUpload,
  SessionState,
  StimulusRequest,
  TickSummary,
  TraceRow,
} from './types.js';

export interface Command {
  seq: number;
  method: string;
  path: string;
  body: string | null;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`HTTP ${status}: ${typeof detail === 'string' ? detail : JSON.stringify(detail)}`);
  }
}

const MUTATING = new Set(['POST', 'PUT', 'DELETE']);

export class LabClient {
  readonly commands: Command[] = [];
  private nextSeq = 0;

  constructor(
    private base: string,
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown, raw?: string): Promise<T> {
    const payload = raw !== undefined ? raw : body !== undefined ? JSON.stringify(body) : null;
    if (MUTATING.has(method)) {
      this.commands.push({ seq: this.nextSeq++, method, path, body: payload });
    }
    const init: RequestInit = { method };
    if (payload !== null) {
      init.body = payload;
      init.headers = raw !== undefined ? { 'content-type': 'text/plain' } : { 'content-type': 'application/json' };
    }
    const response = await this.fetchImpl(this.base + path, init);
    let parsed: unknown = null;
    const text = await response.text();
    if (text) {
      try {
        parsed = JSON.parse(text);
      } catch {
        parsed = text;
      }
    }
    if (!response.ok) {
      const detail =
        parsed && typeof parsed === 'object' && 'detail' in (parsed as Record<string, unknown>)
          ? (parsed as Record<string, unknown>).detail
          : parsed;
      throw new ApiError(response.status, detail);
    }
    return parsed as T;
  }

  // -- interventions (each bench control maps to exactly one of these) ----

  loadModel(text: string): Promise<ModelUpload> {
    return this.request('POST', '/models', undefined, text);
  }

  createSession(modelId: string, seed: number): Promise<{ session_id: string }> {
    return this.request('POST', '/sessions', { model_id: modelId, seed });
  }

  step(sessionId: string, ticks: number): Promise<TickSummary[]> {
    return this.request('POST', `/sessions/${sessionId}/step`, { ticks });
  }

  addStimulus(sessionId: string, stimulus: StimulusRequest): Promise<{ ok: boolean }> {
    return this.request('POST', `/sessions/${sessionId}/stimuli`, stimulus);
  }

  addLesion(sessionId: string, lesion: LesionRequest): Promise<{ ok: boolean; lesion_id: string }> {
    return this.request('POST', `/sessions/${sessionId}/lesions`, lesion);
  }

  fork(sessionId: string): Promise<{ session_id: string }> {
    return this.request('POST', `/sessions/${sessionId}/fork`);
  }

  endSession(sessionId: string): Promise<{ status: string }> {
    return this.request('POST', `/sessions/${sessionId}/end`);
  }

  // -- reads ---------------------------------------------------------------

  getModel(modelId: string): Promise<ModelInfo> {
    return this.request('GET', `/models/${modelId}`);
  }

  getState(sessionId: string): Promise<SessionState> {
    return this.request('GET', `/sessions/${sessionId}/state`);
  }

  async getTrace(sessionId: string, fromTick = 0): Promise<TraceRow[]> {
    const result = await this.request<{ rows: TraceRow[] }>(
      'GET',
      `/sessions/${sessionId}/trace?from=${fromTick}`,
    );
    return result.rows;
  }

  eventsUrl(sessionId: string, cursor = 0): string {
    return `${this.base}/sessions/${sessionId}/events?cursor=${cursor}&follow=true`;
  }
}
