/** Pure view-model construction. No DOM, no network: easy to test. */

import type { SessionHandle, TurnRow } from './types.js';

export interface TurnView {
  index: number;
  runIndex: number;
  reason: string;
  actionChip: string;
  observation: string;
  invalid: boolean;
}

export interface SuggestionCard {
  paperId: string;
  title: string | null;
  abstract: string | null;
  href: string;
}

export interface SessionView {
  sessionId: string;
  stateBadge: 'running' | 'awaiting_decision' | 'finished';
  currentRun: number;
  turns: TurnView[];
  suggestions: SuggestionCard[];
  decisionEnabled: boolean;
  stopReason: string | null;
  banner: string | null;
}

export function actionChip(turn: TurnRow): string {
  if (!turn.action) return turn.error ? `invalid (${turn.error})` : 'invalid';
  const args = Object.entries(turn.action.arguments)
    .map(([key, value]) => `${key}=${truncate(value, 40)}`)
    .join(', ');
  return args ? `${turn.action.name}(${args})` : turn.action.name;
}

/** Recover a suggestion's title/abstract from the observations the model saw. */
export function extractPaperCard(
  turns: TurnRow[],
  paperId: string,
  linkBase = '#paper/',
): SuggestionCard {
  let title: string | null = null;
  let abstract: string | null = null;
  for (const turn of turns) {
    const lines = turn.observation.split('\n');
    for (let i = 0; i < lines.length; i += 1) {
      if (!lines[i]?.endsWith(`Paper ID: ${paperId}`)) continue;
      for (let j = i + 1; j < lines.length; j += 1) {
        const line = lines[j] ?? '';
        if (/^\d+\. Paper ID: /.test(line.trim())) break;
        const titleMatch = line.match(/^\s*Title: (.*)$/);
        if (titleMatch) title = titleMatch[1] ?? null;
        const abstractMatch = line.match(/^\s*Abstract: (.*)$/);
        if (abstractMatch) abstract = abstractMatch[1] ?? null;
      }
    }
  }
  return { paperId, title, abstract, href: `${linkBase}${paperId}` };
}

export function buildSessionView(
  handle: SessionHandle,
  turns: TurnRow[],
  banner: string | null = null,
): SessionView {
  return {
    sessionId: handle.session_id,
    stateBadge: handle.state,
    currentRun: handle.current_run,
    turns: turns.map((turn) => ({
      index: turn.index,
      runIndex: turn.run_index,
      reason: turn.reason,
      actionChip: actionChip(turn),
      // observations render verbatim: the audit must show what the model saw
      observation: turn.observation,
      invalid: turn.action === null,
    })),
    suggestions: handle.suggestions.map((paperId) =>
      extractPaperCard(turns, paperId),
    ),
    decisionEnabled: handle.state === 'awaiting_decision',
    stopReason: handle.stop_reason,
    banner,
  };
}

function truncate(value: string, limit: number): string {
  return value.length <= limit ? value : `${value.slice(0, limit - 1)}…`;
}
