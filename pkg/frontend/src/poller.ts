/** Polls the service for new turns and state changes.
 *
 * Turns accumulate monotonically (`since` advances past what was seen);
 * the interval backs off exponentially on errors and resets on success.
 */

import type { ApiClient } from './api.js';
import type { SessionHandle, TurnRow } from './types.js';

export interface PollUpdate {
  handle: SessionHandle;
  newTurns: TurnRow[];
}

export interface PollerOptions {
  intervalMs?: number;
  maxIntervalMs?: number;
  onUpdate?: (update: PollUpdate) => void;
  onError?: (error: unknown) => void;
}

export class SessionPoller {
  readonly turns: TurnRow[] = [];
  private since = 0;
  private readonly baseInterval: number;
  private readonly maxInterval: number;
  private currentInterval: number;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;

  constructor(
    private readonly api: ApiClient,
    private readonly sessionId: string,
    private readonly options: PollerOptions = {},
  ) {
    this.baseInterval = options.intervalMs ?? 1000;
    this.maxInterval = options.maxIntervalMs ?? 8000;
    this.currentInterval = this.baseInterval;
  }

  /** One poll round; safe to drive manually (tests, manual refresh button). */
  async tick(): Promise<PollUpdate> {
    try {
      const handle = await this.api.getSession(this.sessionId);
      const newTurns = await this.api.getTurns(this.sessionId, this.since);
      for (const turn of newTurns) {
        if (turn.index >= this.since) {
          this.turns.push(turn);
          this.since = turn.index + 1;
        }
      }
      this.currentInterval = this.baseInterval;
      const update = { handle, newTurns };
      this.options.onUpdate?.(update);
      return update;
    } catch (error) {
      this.currentInterval = Math.min(this.currentInterval * 2, this.maxInterval);
      this.options.onError?.(error);
      throw error;
    }
  }

  start(): void {
    this.stopped = false;
    const loop = async () => {
      if (this.stopped) return;
      try {
        const { handle } = await this.tick();
        if (handle.state === 'finished') return; // terminal: stop polling
      } catch {
        // backoff already applied; keep trying
      }
      if (!this.stopped) {
        this.timer = setTimeout(loop, this.currentInterval);
      }
    };
    void loop();
  }

  stop(): void {
    this.stopped = true;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  get intervalMs(): number {
    return this.currentInterval;
  }
}
