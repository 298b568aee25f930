/** Shared test plumbing: page markup, recorded fixtures, and a fetch stub. */

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { vi } from 'vitest';

const here = dirname(fileURLToPath(import.meta.url));

export function loadFixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, 'fixtures', name), 'utf-8')) as T;
}

/** Mount the real index.html markup so tests exercise the shipped ids. */
export function mountPage(): void {
  const html = readFileSync(join(here, '..', 'index.html'), 'utf-8');
  const body = html.slice(html.indexOf('<main'), html.indexOf('</main>') + 7);
  document.body.innerHTML = body;
}

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
  signal: AbortSignal | undefined;
}

export interface FetchStub {
  requests: RecordedRequest[];
  /** Route table: exact URL -> responder. */
  route(url: string, responder: (req: RecordedRequest) => Response | Promise<Response>): void;
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

/** Install a fetch mock that records every request it serves. */
export function stubFetch(): FetchStub {
  const routes = new Map<string, (req: RecordedRequest) => Response | Promise<Response>>();
  const requests: RecordedRequest[] = [];
  vi.stubGlobal(
    'fetch',
    vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      const request: RecordedRequest = {
        url,
        method: init?.method ?? 'GET',
        body: init?.body ? JSON.parse(String(init.body)) : undefined,
        signal: init?.signal ?? undefined,
      };
      requests.push(request);
      const responder = routes.get(url);
      if (!responder) throw new Error(`no route for ${url}`);
      return responder(request);
    }),
  );
  return {
    requests,
    route(url, responder) {
      routes.set(url, responder);
    },
  };
}

export function flushMicrotasks(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
