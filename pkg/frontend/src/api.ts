/** Typed HTTP client for the session service. Holds no state of its own. */

import type {
  CreateSessionRequest,
  DecisionRequest,
  SessionHandle,
  TurnRow,
} from './types.js';

export class ServiceError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = 'ServiceError';
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, '');
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  async createSession(request: CreateSessionRequest): Promise<SessionHandle> {
    return this.request<SessionHandle>('POST', '/sessions', request);
  }

  async getSession(sessionId: string): Promise<SessionHandle> {
    return this.request<SessionHandle>('GET', `/sessions/${sessionId}`);
  }

  async getTurns(sessionId: string, since = 0): Promise<TurnRow[]> {
    const body = await this.request<{ turns: TurnRow[] }>(
      'GET',
      `/sessions/${sessionId}/turns?since=${since}`,
    );
    return body.turns;
  }

  async postDecision(
    sessionId: string,
    request: DecisionRequest,
  ): Promise<SessionHandle> {
    return this.request<SessionHandle>(
      'POST',
      `/sessions/${sessionId}/decision`,
      request,
    );
  }

  async health(): Promise<boolean> {
    try {
      await this.request<{ status: string }>('GET', '/healthz');
      return true;
    } catch {
      return false;
    }
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, {
        method,
        headers: body === undefined ? undefined : { 'content-type': 'application/json' },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ServiceError('unreachable', String(err), 0);
    }
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      const code = typeof payload?.code === 'string' ? payload.code : 'error';
      const message =
        typeof payload?.message === 'string' ? payload.message : response.statusText;
      throw new ServiceError(code, message, response.status);
    }
    return payload as T;
  }
}
