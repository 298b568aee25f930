/**
 * Single-page UI: a query box with a chunk-count stepper, the generated
 * topic labels as a clickable browser, and the ranked supporting chunks.
 *
 * State machine: idle -> loading -> idle | error. Results render only after
 * a successful response; prior results stay on screen until then. One query
 * is in flight at a time -- a new submission aborts the pending request.
 * Hits render in API order with scores fixed to 4 decimals; the client never
 * re-sorts.
 */

import { ApiError, LensApi, type Hit, type TopicRow } from './api.js';

export const MIN_K = 1;
export const MAX_K = 100;
export const DEFAULT_K = 5;

export type Status = 'idle' | 'loading' | 'error';

export interface UiState {
  queryText: string;
  k: number;
  topics: TopicRow[];
  hits: Hit[];
  status: Status;
  errorMessage: string | null;
}

export function clampK(raw: number): number {
  if (!Number.isFinite(raw)) return DEFAULT_K;
  return Math.min(MAX_K, Math.max(MIN_K, Math.round(raw)));
}

export function formatScore(score: number): string {
  return score.toFixed(4);
}

interface Elements {
  form: HTMLFormElement;
  queryInput: HTMLInputElement;
  kInput: HTMLInputElement;
  statusBox: HTMLElement;
  topicsBox: HTMLElement;
  resultsBox: HTMLElement;
}

export class App {
  readonly state: UiState = {
    queryText: '',
    k: DEFAULT_K,
    topics: [],
    hits: [],
    status: 'idle',
    errorMessage: null,
  };

  private elements: Elements;
  private pending: AbortController | null = null;

  constructor(
    private readonly api: LensApi,
    root: ParentNode,
  ) {
    this.elements = {
      form: must(root.querySelector<HTMLFormElement>('#query-form')),
      queryInput: must(root.querySelector<HTMLInputElement>('#query-input')),
      kInput: must(root.querySelector<HTMLInputElement>('#k-input')),
      statusBox: must(root.querySelector<HTMLElement>('#status')),
      topicsBox: must(root.querySelector<HTMLElement>('#topics')),
      resultsBox: must(root.querySelector<HTMLElement>('#results')),
    };
    this.elements.kInput.min = String(MIN_K);
    this.elements.kInput.max = String(MAX_K);
    if (!this.elements.kInput.value) {
      this.elements.kInput.value = String(DEFAULT_K);
    }
    this.elements.form.addEventListener('submit', (event) => {
      event.preventDefault();
      void this.submit();
    });
  }

  /** Fetch and render the topic browser; API failure shows a retry banner. */
  async loadTopics(): Promise<void> {
    try {
      this.state.topics = await this.api.topics();
      this.renderTopics();
      if (this.state.status === 'error') this.setStatus('idle');
    } catch (error) {
      this.setStatus('error', describe(error));
      this.renderRetryTopics();
    }
  }

  /** Submit the current form; whitespace-only queries send nothing. */
  async submit(): Promise<void> {
    const text = this.elements.queryInput.value;
    if (!text.trim()) return;

    const k = clampK(Number(this.elements.kInput.value));
    this.elements.kInput.value = String(k);
    this.state.queryText = text;
    this.state.k = k;

    this.pending?.abort();
    const controller = new AbortController();
    this.pending = controller;
    this.setStatus('loading');
    try {
      const response = await this.api.query(text.trim(), k, controller.signal);
      if (controller.signal.aborted) return; // a newer query took over
      this.state.hits = response.hits;
      this.setStatus('idle');
      this.renderResults();
    } catch (error) {
      if (isAbort(error)) return;
      // keep the entered query and the previous results on screen
      this.setStatus('error', describe(error));
    } finally {
      if (this.pending === controller) this.pending = null;
    }
  }

  queryTopic(label: string): void {
    this.elements.queryInput.value = label;
    void this.submit();
  }

  private setStatus(status: Status, message: string | null = null): void {
    this.state.status = status;
    this.state.errorMessage = status === 'error' ? message : null;
    const box = this.elements.statusBox;
    box.textContent = '';
    box.className = status;
    if (status === 'loading') {
      box.textContent = 'Searching…';
    } else if (status === 'error') {
      const banner = document.createElement('div');
      banner.className = 'error-banner';
      banner.textContent = message ?? 'Request failed';
      box.appendChild(banner);
    }
  }

  private renderTopics(): void {
    const box = this.elements.topicsBox;
    box.textContent = '';
    if (this.state.topics.length === 0) {
      const empty = document.createElement('p');
      empty.className = 'empty-state';
      empty.textContent = 'No topics built yet. Run the pipeline, then reload.';
      box.appendChild(empty);
      return;
    }
    const list = document.createElement('ul');
    list.className = 'topic-list';
    for (const topic of this.state.topics) {
      const item = document.createElement('li');
      const button = document.createElement('button');
      button.type = 'button';
      button.className = 'topic-chip';
      const label = topic.label ?? topic.keywords.slice(0, 3).join(', ');
      button.textContent = label;
      const freq = document.createElement('span');
      freq.className = 'topic-frequency';
      freq.textContent = String(topic.frequency);
      button.appendChild(freq);
      button.addEventListener('click', () => this.queryTopic(label));
      item.appendChild(button);
      list.appendChild(item);
    }
    box.appendChild(list);
  }

  private renderRetryTopics(): void {
    const box = this.elements.topicsBox;
    box.textContent = '';
    const retry = document.createElement('button');
    retry.type = 'button';
    retry.className = 'retry-button';
    retry.textContent = 'Retry loading topics';
    retry.addEventListener('click', () => void this.loadTopics());
    box.appendChild(retry);
  }

  private renderResults(): void {
    const box = this.elements.resultsBox;
    box.textContent = '';
    if (this.state.hits.length === 0) {
      const empty = document.createElement('p');
      empty.className = 'empty-state';
      empty.textContent = 'No results.';
      box.appendChild(empty);
      return;
    }
    this.state.hits.forEach((hit, position) => {
      const card = document.createElement('article');
      card.className = 'result-card';

      const header = document.createElement('header');
      const rank = document.createElement('span');
      rank.className = 'rank';
      rank.textContent = `#${position + 1}`;
      const score = document.createElement('span');
      score.className = 'score';
      score.textContent = formatScore(hit.score);
      const badge = document.createElement('span');
      badge.className = 'chunk-badge';
      badge.textContent = `${hit.doc_id} / ${hit.chunk_id}`;
      header.append(rank, score, badge);

      const body = document.createElement('p');
      body.className = 'chunk-text';
      body.textContent = hit.text;

      card.append(header, body);
      box.appendChild(card);
    });
  }
}

function must<T>(value: T | null): T {
  if (value === null) throw new Error('required element missing from page');
  return value;
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.message} (HTTP ${error.status})`;
  if (error instanceof Error) return error.message;
  return String(error);
}

function isAbort(error: unknown): boolean {
  return error instanceof DOMException && error.name === 'AbortError';
}
