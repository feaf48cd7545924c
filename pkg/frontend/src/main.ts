/** Browser entry point: wire the form, controller, and renderer together. */

import { ApiClient } from './api.js';
import { renderSessionView } from './dom.js';
import { ReviewController } from './review.js';

function baseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get('service');
  return fromQuery ?? 'http://127.0.0.1:8377';
}

export function mount(root: HTMLElement): void {
  const api = new ApiClient(baseUrl());
  const output = document.createElement('div');
  output.className = 'session';

  const controller = new ReviewController(api, {
    pollIntervalMs: 1000,
    onChange: (view) =>
      renderSessionView(view, output, {
        onDecision: (decision, verdict) => {
          void controller.submitDecision(decision, verdict);
        },
      }),
  });

  const form = document.createElement('form');
  form.innerHTML = `
    <textarea name="excerpt" rows="4" cols="80"
      placeholder="Excerpt with [CITATION] marker"></textarea>
    <input name="source_title" placeholder="Source paper title (optional)" />
    <input name="profile" value="scripted" />
    <button type="submit">Start review</button>
  `;
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const data = new FormData(form);
    void controller
      .startReview({
        excerpt: String(data.get('excerpt') ?? ''),
        profile: String(data.get('profile') ?? 'scripted'),
        source_title: String(data.get('source_title') ?? '') || undefined,
      })
      .then((view) =>
        renderSessionView(view, output, {
          onDecision: (decision, verdict) => {
            void controller.submitDecision(decision, verdict);
          },
        }),
      );
  });

  root.append(form, output);
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  mount(document.getElementById('app') as HTMLElement);
}
