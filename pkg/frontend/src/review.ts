/** Review controller: one session per instance, steering with idempotency.
 *
 * The decision token is derived from the session position (run index and
 * suggestion count), so a double-click re-sends the same token and the
 * service applies it once. Controls lock after a submit and unlock only
 * when a poll observes the state change.
 */

import { ApiClient, ServiceError } from './api.js';
import { SessionPoller } from './poller.js';
import type {
  CreateSessionRequest,
  Decision,
  SessionHandle,
  TurnRow,
  Verdict,
} from './types.js';
import { buildSessionView, type SessionView } from './view.js';

export interface ReviewOptions {
  pollIntervalMs?: number;
  onChange?: (view: SessionView) => void;
}

export class ReviewController {
  private handle: SessionHandle | null = null;
  private poller: SessionPoller | null = null;
  private banner: string | null = null;
  private decisionLocked = false;
  private lockedAt: { run: number; suggestions: number } | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly options: ReviewOptions = {},
  ) {}

  get turns(): TurnRow[] {
    return this.poller ? this.poller.turns : [];
  }

  currentView(): SessionView {
    if (!this.handle) {
      return emptyView(this.banner);
    }
    const view = buildSessionView(this.handle, this.turns, this.banner);
    if (this.decisionLocked) view.decisionEnabled = false;
    return view;
  }

  /** Create the session and start polling. Service errors surface as a banner. */
  async startReview(request: CreateSessionRequest): Promise<SessionView> {
    try {
      this.handle = await this.api.createSession(request);
    } catch (error) {
      this.banner = describeError(error);
      return this.currentView();
    }
    this.banner = null;
    this.poller = new SessionPoller(this.api, this.handle.session_id, {
      intervalMs: this.options.pollIntervalMs ?? 1000,
      onUpdate: ({ handle }) => this.applyHandle(handle),
      onError: (error) => {
        this.banner = describeError(error);
        this.emit();
      },
    });
    this.poller.start();
    return this.currentView();
  }

  /** One manual poll round; used by tests and a refresh button. */
  async refresh(): Promise<SessionView> {
    if (this.poller) {
      try {
        await this.poller.tick();
        this.banner = null;
      } catch (error) {
        this.banner = describeError(error);
      }
    }
    return this.currentView();
  }

  async submitDecision(decision: Decision, verdict?: Verdict): Promise<SessionView> {
    if (!this.handle) throw new Error('no active session');
    if (this.decisionLocked) return this.currentView(); // double-click guard
    if (this.handle.state !== 'awaiting_decision') {
      return this.refresh(); // stale view: re-sync instead of failing
    }
    const token = this.decisionToken();
    this.decisionLocked = true;
    this.lockedAt = {
      run: this.handle.current_run,
      suggestions: this.handle.suggestions.length,
    };
    try {
      const handle = await this.api.postDecision(this.handle.session_id, {
        decision,
        verdict,
        token,
      });
      this.applyHandle(handle);
    } catch (error) {
      if (error instanceof ServiceError && error.status === 409) {
        // stale view; refresh resolves the real state
        this.decisionLocked = false;
        this.lockedAt = null;
        return this.refresh();
      }
      this.decisionLocked = false;
      this.lockedAt = null;
      this.banner = describeError(error);
      this.emit();
      throw error;
    }
    return this.currentView();
  }

  stop(): void {
    this.poller?.stop();
  }

  /** Stable for a given session position, so retries repeat the same token. */
  decisionToken(): string {
    if (!this.handle) throw new Error('no active session');
    return `d-${this.handle.session_id}-${this.handle.current_run}-${this.handle.suggestions.length}`;
  }

  private applyHandle(handle: SessionHandle): void {
    this.handle = handle;
    if (this.decisionLocked) {
      const before = this.lockedAt;
      const moved =
        !before ||
        handle.state !== 'awaiting_decision' ||
        handle.current_run !== before.run ||
        handle.suggestions.length !== before.suggestions;
      if (moved) {
        // state change observed: release the controls
        this.decisionLocked = false;
        this.lockedAt = null;
      }
    }
    this.emit();
  }

  private emit(): void {
    this.options.onChange?.(this.currentView());
  }
}

function describeError(error: unknown): string {
  if (error instanceof ServiceError) {
    return error.status === 0
      ? `Service unreachable: ${error.message}. Retry when the service is back.`
      : `Service error (${error.code}): ${error.message}`;
  }
  return String(error);
}

function emptyView(banner: string | null): SessionView {
  return {
    sessionId: '',
    stateBadge: 'running',
    currentRun: 0,
    turns: [],
    suggestions: [],
    decisionEnabled: false,
    stopReason: null,
    banner,
  };
}
