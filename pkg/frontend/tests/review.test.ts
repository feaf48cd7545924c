/** Round-trip tests against a scripted service session. */
import { describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { ReviewController } from '../src/review.js';
import { buildSessionView, extractPaperCard } from '../src/view.js';
import { FakeService, paperObservation } from './fake-service.js';

const SEARCH_OBSERVATION = paperObservation([
  {
    id: 'bandit-paper',
    title: 'Sequential Design for Transductive Bandits',
    abstract: 'Measurements and answers may differ.',
    year: 2019,
  },
  { id: 'other-paper', title: 'Unrelated Survey', abstract: 'A survey.', year: 2001 },
]);

function scriptedRuns() {
  return [
    {
      turns: [
        {
          reason: 'search for the key phrase',
          action: { name: 'search_relevance', arguments: { query: 'transductive bandits' } },
          observation: SEARCH_OBSERVATION,
        },
        {
          reason: 'the first result defines the setting',
          action: { name: 'select', arguments: { paper_id: 'bandit-paper' } },
          observation: 'Selected paper bandit-paper.',
        },
      ],
      suggestion: 'bandit-paper',
    },
    {
      turns: [
        {
          reason: 'look for an alternative',
          action: { name: 'search_relevance', arguments: { query: 'bandits survey' } },
          observation: SEARCH_OBSERVATION,
        },
        {
          reason: 'pick the alternative',
          action: { name: 'select', arguments: { paper_id: 'other-paper' } },
          observation: 'Selected paper other-paper.',
        },
      ],
      suggestion: 'other-paper',
    },
  ];
}

function setup() {
  const service = new FakeService(scriptedRuns());
  const api = new ApiClient('http://svc.test', service.fetch);
  const controller = new ReviewController(api, { pollIntervalMs: 100000 });
  return { service, api, controller };
}

async function startAndFinishRun(service: FakeService, controller: ReviewController) {
  const initial = await controller.startReview({
    excerpt: 'In the spirit of transductive bandits [CITATION] ...',
    profile: 'scripted',
    item_id: 'bandits',
  });
  controller.stop(); // tests drive polling manually via refresh()
  expect(initial.stateBadge).toBe('running');
  service.completeRun();
  return controller.refresh();
}

describe('start_review', () => {
  it('creates the session and renders every turn after polling', async () => {
    const { service, controller } = setup();
    const view = await startAndFinishRun(service, controller);

    expect(view.stateBadge).toBe('awaiting_decision');
    expect(view.decisionEnabled).toBe(true);
    expect(view.turns).toHaveLength(2);
    // observation panels are verbatim: what the model saw is what is shown
    expect(view.turns[0]?.observation).toBe(SEARCH_OBSERVATION);
    expect(view.turns[0]?.actionChip).toBe(
      'search_relevance(query=transductive bandits)',
    );
    // the suggestion card recovers title/abstract from the observations
    expect(view.suggestions).toHaveLength(1);
    expect(view.suggestions[0]?.title).toBe(
      'Sequential Design for Transductive Bandits',
    );
    expect(view.suggestions[0]?.abstract).toBe('Measurements and answers may differ.');
    expect(view.suggestions[0]?.href).toContain('bandit-paper');
  });

  it('shows an error banner and creates no session when the service is down', async () => {
    const { service, controller } = setup();
    service.failNextRequests = 1;
    const view = await controller.startReview({
      excerpt: 'x [CITATION]',
      profile: 'scripted',
    });
    expect(view.banner).toContain('unreachable');
    expect(view.sessionId).toBe('');
    expect(service.handle).toBeNull();
  });

  it('polling accumulates turns monotonically across runs', async () => {
    const { service, controller } = setup();
    await startAndFinishRun(service, controller);
    await controller.submitDecision('continue', 'accept');
    service.completeRun();
    const view = await controller.refresh();
    expect(view.turns.map((t) => t.index)).toEqual([0, 1, 2, 3]);
    expect(view.currentRun).toBe(1);
    expect(view.suggestions.map((s) => s.paperId)).toEqual([
      'bandit-paper',
      'other-paper',
    ]);
  });
});

describe('submit_decision', () => {
  it('stop transitions the view to finished', async () => {
    const { service, controller } = setup();
    await startAndFinishRun(service, controller);
    const view = await controller.submitDecision('stop', 'accept');
    expect(view.stateBadge).toBe('finished');
    expect(view.stopReason).toBe('user_stop');
    expect(view.decisionEnabled).toBe(false);
    expect(service.decisions).toHaveLength(1);
  });

  it('double-submit records exactly one decision', async () => {
    const { service, controller } = setup();
    await startAndFinishRun(service, controller);
    await Promise.all([
      controller.submitDecision('stop', 'accept'),
      controller.submitDecision('stop', 'accept'),
    ]);
    expect(service.decisions).toHaveLength(1);

    // and even a raw re-send of the same token is applied only once
    const api = new ApiClient('http://svc.test', service.fetch);
    await api.postDecision('fake-session-1', {
      decision: 'stop',
      verdict: 'accept',
      token: service.decisions[0]!.token,
    });
    expect(service.decisions).toHaveLength(1);
  });

  it('locks the controls until the state change is observed', async () => {
    const { service, controller } = setup();
    await startAndFinishRun(service, controller);
    const afterSubmit = await controller.submitDecision('continue', 'accept');
    expect(afterSubmit.decisionEnabled).toBe(false); // running again
    service.completeRun();
    const next = await controller.refresh();
    expect(next.decisionEnabled).toBe(true); // fresh decision point, new token
    expect(controller.decisionToken()).not.toBe(service.decisions[0]!.token);
  });

  it('accept and reject verdicts land in the annotation output file', async () => {
    const { service, controller } = setup();
    await startAndFinishRun(service, controller);
    await controller.submitDecision('continue', 'accept'); // accept bandit-paper
    service.completeRun();
    await controller.refresh();
    await controller.submitDecision('stop', 'reject'); // reject other-paper

    const annotations = service.annotationsFile();
    expect(annotations).toBe(
      JSON.stringify({ item_id: 'bandits', human_paper_ids: ['bandit-paper'] }) + '\n',
    );
  });

  it('a stale view resolves by refreshing instead of failing', async () => {
    const { service, controller } = setup();
    await startAndFinishRun(service, controller);
    // someone else stops the session behind this client's back
    const api = new ApiClient('http://svc.test', service.fetch);
    await api.postDecision('fake-session-1', { decision: 'stop', token: 'outside' });
    const view = await controller.submitDecision('stop', 'accept');
    expect(view.stateBadge).toBe('finished');
    expect(service.decisions).toHaveLength(1); // only the outside decision
  });
});

describe('view model', () => {
  it('disables decision controls in every non-awaiting state', () => {
    const base = {
      session_id: 's',
      current_run: 0,
      suggestions: [],
      stop_reason: null,
      item_id: 'i',
      turn_count: 0,
    };
    for (const state of ['running', 'finished'] as const) {
      const view = buildSessionView({ ...base, state }, []);
      expect(view.decisionEnabled).toBe(false);
    }
    const awaiting = buildSessionView({ ...base, state: 'awaiting_decision' }, []);
    expect(awaiting.decisionEnabled).toBe(true);
  });

  it('extractPaperCard falls back to the bare id when unseen', () => {
    const card = extractPaperCard([], 'mystery');
    expect(card).toEqual({
      paperId: 'mystery',
      title: null,
      abstract: null,
      href: '#paper/mystery',
    });
  });
});
