/** Wire types of the session service (mirrors its documented JSON contract). */

export type SessionState = 'running' | 'awaiting_decision' | 'finished';

export interface SessionHandle {
  session_id: string;
  state: SessionState;
  current_run: number;
  suggestions: string[];
  stop_reason: string | null;
  item_id: string;
  turn_count: number;
}

export interface ActionCall {
  name: string;
  arguments: Record<string, string>;
}

export interface TurnRow {
  index: number;
  run_index: number;
  reason: string;
  action: ActionCall | null;
  observation: string;
  error: string | null;
}

export interface CreateSessionRequest {
  excerpt: string;
  profile: string;
  source_title?: string;
  source_paper_id?: string;
  item_id?: string;
  max_steps?: number;
}

export type Decision = 'continue' | 'stop';
export type Verdict = 'accept' | 'reject';

export interface DecisionRequest {
  decision: Decision;
  verdict?: Verdict;
  token: string;
}
