/**
 * Typed client for the lens JSON API.
 *
 * The UI talks to exactly three endpoints: GET /api/health, GET /api/topics,
 * and POST /api/query. Queries accept an AbortSignal so a new submission can
 * cancel the one in flight.
 */

export interface TopicRow {
  topic_id: number;
  label: string | null;
  frequency: number;
  keywords: string[];
}

export interface Hit {
  chunk_id: string;
  doc_id: string;
  score: number;
  text: string;
}

export interface QueryResponse {
  hits: Hit[];
}

export interface HealthResponse {
  status: string;
  index_size: number;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = response.statusText || `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { error?: string; detail?: string };
    if (body.detail) detail = body.detail;
    else if (body.error) detail = body.error;
  } catch {
    // non-JSON error body: keep the status text
  }
  return new ApiError(response.status, detail);
}

export class LensApi {
  constructor(private readonly baseUrl: string = '') {}

  async health(): Promise<HealthResponse> {
    const response = await fetch(`${this.baseUrl}/api/health`);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as HealthResponse;
  }

  async topics(): Promise<TopicRow[]> {
    const response = await fetch(`${this.baseUrl}/api/topics`);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as TopicRow[];
  }

  async query(query: string, k: number, signal?: AbortSignal): Promise<QueryResponse> {
    const response = await fetch(`${this.baseUrl}/api/query`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ query, k }),
      signal,
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as QueryResponse;
  }
}
