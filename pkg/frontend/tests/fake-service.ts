/** In-memory scripted stand-in for the session service.
 *
 * Implements the documented endpoints as a fetch function, including the
 * decision-token idempotency and the annotations output the real service
 * maintains. Runs are scripted: a run's turns and suggestion appear when
 * the test calls completeRun(), mimicking the background worker.
 */

import type { FetchLike } from '../src/api.js';
import type {
  DecisionRequest,
  SessionHandle,
  TurnRow,
} from '../src/types.js';

export interface ScriptedRun {
  turns: Array<Pick<TurnRow, 'reason' | 'action' | 'observation'> & { error?: string | null }>;
  suggestion: string | null;
}

export class FakeService {
  handle: SessionHandle | null = null;
  revealed: TurnRow[] = [];
  decisions: DecisionRequest[] = [];
  appliedTokens = new Set<string>();
  accepted = new Map<string, string[]>();
  failNextRequests = 0;
  requestLog: string[] = [];

  private runIndex = 0;

  constructor(private readonly runs: ScriptedRun[]) {}

  /** The background run "finishes": turns appear, state flips to awaiting. */
  completeRun(): void {
    if (!this.handle) throw new Error('no session yet');
    const run = this.runs[this.runIndex];
    if (!run) throw new Error(`no scripted run ${this.runIndex}`);
    for (const turn of run.turns) {
      this.revealed.push({
        index: this.revealed.length,
        run_index: this.runIndex,
        reason: turn.reason,
        action: turn.action,
        observation: turn.observation,
        error: turn.error ?? null,
      });
    }
    if (run.suggestion) this.handle.suggestions.push(run.suggestion);
    this.handle.state = 'awaiting_decision';
    this.handle.turn_count = this.revealed.length;
  }

  annotationsFile(): string {
    const lines: string[] = [];
    for (const [itemId, ids] of [...this.accepted.entries()].sort()) {
      lines.push(JSON.stringify({ item_id: itemId, human_paper_ids: ids }));
    }
    return lines.length ? lines.join('\n') + '\n' : '';
  }

  fetch: FetchLike = async (url, init) => {
    this.requestLog.push(`${init?.method ?? 'GET'} ${url}`);
    if (this.failNextRequests > 0) {
      this.failNextRequests -= 1;
      throw new Error('connection refused');
    }
    const { pathname, searchParams } = new URL(url);
    const method = init?.method ?? 'GET';
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;

    if (method === 'GET' && pathname === '/healthz') {
      return json(200, { status: 'ok' });
    }
    if (method === 'POST' && pathname === '/sessions') {
      if (!body?.profile || body.profile !== 'scripted') {
        return json(400, { code: 'bad_config', message: `unknown profile ${body?.profile}` });
      }
      this.handle = {
        session_id: 'fake-session-1',
        state: 'running',
        current_run: 0,
        suggestions: [],
        stop_reason: null,
        item_id: body.item_id ?? 'fake-item',
        turn_count: 0,
      };
      return json(201, this.handle);
    }

    const sessionMatch = pathname.match(/^\/sessions\/([^/]+)(\/.*)?$/);
    if (!sessionMatch || !this.handle || sessionMatch[1] !== this.handle.session_id) {
      return json(404, { code: 'unknown_session', message: 'no such session' });
    }
    const rest = sessionMatch[2] ?? '';

    if (method === 'GET' && rest === '') {
      return json(200, this.handle);
    }
    if (method === 'GET' && rest === '/turns') {
      const since = Number(searchParams.get('since') ?? '0');
      return json(200, { turns: this.revealed.filter((t) => t.index >= since) });
    }
    if (method === 'POST' && rest === '/decision') {
      const request = body as DecisionRequest;
      if (request.token && this.appliedTokens.has(request.token)) {
        return json(200, this.handle); // replay, not re-applied
      }
      if (this.handle.state !== 'awaiting_decision') {
        return json(409, { code: 'wrong_state', message: `session is ${this.handle.state}` });
      }
      if (request.token) this.appliedTokens.add(request.token);
      this.decisions.push(request);
      const lastSuggestion = this.handle.suggestions.at(-1);
      if (request.verdict === 'accept' && lastSuggestion) {
        const bucket = this.accepted.get(this.handle.item_id) ?? [];
        if (!bucket.includes(lastSuggestion)) bucket.push(lastSuggestion);
        this.accepted.set(this.handle.item_id, bucket);
      }
      if (request.decision === 'stop') {
        this.handle.state = 'finished';
        this.handle.stop_reason = 'user_stop';
      } else {
        this.handle.current_run += 1;
        this.handle.state = 'running';
        this.runIndex += 1;
      }
      return json(200, this.handle);
    }
    return json(404, { code: 'unknown_route', message: pathname });
  };
}

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

/** Observation text in the exact shape the agent renderer produces. */
export function paperObservation(
  entries: Array<{ id: string; title: string; abstract: string; year?: number }>,
): string {
  return entries
    .map(
      (entry, i) =>
        `${i + 1}. Paper ID: ${entry.id}\n` +
        `   Title: ${entry.title}\n` +
        (entry.year ? `   Year: ${entry.year}\n` : '') +
        `   Abstract: ${entry.abstract}`,
    )
    .join('\n');
}
