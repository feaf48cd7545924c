/** Minimal DOM rendering of a SessionView. Logic stays in view.ts/review.ts. */

import type { SessionView } from './view.js';

export interface DecisionHandlers {
  onDecision: (decision: 'continue' | 'stop', verdict?: 'accept' | 'reject') => void;
}

export function renderSessionView(
  view: SessionView,
  container: HTMLElement,
  handlers: DecisionHandlers,
): void {
  container.replaceChildren();

  if (view.banner) {
    const banner = el('div', 'banner', view.banner);
    const retry = el('button', 'retry', 'Retry');
    retry.addEventListener('click', () => window.location.reload());
    banner.appendChild(retry);
    container.appendChild(banner);
  }
  if (!view.sessionId) return;

  const header = el('div', 'header');
  header.appendChild(el('span', 'session-id', view.sessionId));
  header.appendChild(el('span', `badge badge-${view.stateBadge}`, view.stateBadge));
  header.appendChild(el('span', 'run', `run ${view.currentRun}`));
  container.appendChild(header);

  const turnList = el('ol', 'turns');
  for (const turn of view.turns) {
    const item = el('li', turn.invalid ? 'turn turn-invalid' : 'turn');
    item.appendChild(el('div', 'reason', turn.reason));
    item.appendChild(el('span', 'action-chip', turn.actionChip));
    const observation = el('pre', 'observation');
    observation.textContent = turn.observation;
    item.appendChild(observation);
    turnList.appendChild(item);
  }
  container.appendChild(turnList);

  const cards = el('div', 'suggestions');
  for (const card of view.suggestions) {
    const node = el('div', 'suggestion-card');
    node.appendChild(el('div', 'title', card.title ?? card.paperId));
    if (card.abstract) node.appendChild(el('div', 'abstract', card.abstract));
    const link = el('a', 'link-out', 'open') as HTMLAnchorElement;
    link.href = card.href;
    node.appendChild(link);
    cards.appendChild(node);
  }
  container.appendChild(cards);

  const controls = el('div', 'decision-controls');
  for (const [label, decision, verdict] of [
    ['Accept + continue', 'continue', 'accept'],
    ['Accept + stop', 'stop', 'accept'],
    ['Reject + continue', 'continue', 'reject'],
    ['Reject + stop', 'stop', 'reject'],
  ] as const) {
    const button = el('button', 'decision', label) as HTMLButtonElement;
    button.disabled = !view.decisionEnabled;
    button.addEventListener('click', () => handlers.onDecision(decision, verdict));
    controls.appendChild(button);
  }
  container.appendChild(controls);

  if (view.stateBadge === 'finished') {
    container.appendChild(
      el('div', 'finished', `Finished (${view.stopReason ?? 'done'}).`),
    );
  }
}

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}
