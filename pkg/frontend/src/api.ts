// Thin typed client over the search service HTTP API. Every mutation the
// UI performs goes through one of these methods.

import type {
  LabelRecord,
  QueryBundleDocument,
  ResultsPage,
  ResultsView,
  RunDocument,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export interface ComposePayload {
  prompt: string;
  options: {
    sources: string[];
    query_count: number;
    date_range?: [string, string];
    languages?: string[];
    llm_model_id?: string;
    llm_temperature?: number;
    embedding_model_id?: string;
    embedding_dims?: number;
  };
}

export interface ResultsQuery {
  view?: ResultsView;
  source?: string;
  offset?: number;
  limit?: number;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private fetchFn: FetchLike;

  constructor(
    private baseUrl: string = '',
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(this.baseUrl + path, {
      headers: { 'content-type': 'application/json' },
      ...init,
    });
    if (!response.ok) {
      let message = `${response.status} ${response.statusText}`;
      try {
        const body = (await response.json()) as { error?: string };
        if (body.error) message = body.error;
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(response.status, message);
    }
    return response;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.request(path, init);
    return (await response.json()) as T;
  }

  createRun(payload: ComposePayload): Promise<RunDocument> {
    return this.json('/runs', {
      method: 'POST',
      body: JSON.stringify(payload),
    });
  }

  getRun(runId: string): Promise<RunDocument> {
    return this.json(`/runs/${runId}`);
  }

  startRun(runId: string): Promise<unknown> {
    return this.json(`/runs/${runId}/start`, { method: 'POST' });
  }

  getQueries(runId: string): Promise<QueryBundleDocument> {
    return this.json(`/runs/${runId}/queries`);
  }

  putQueries(
    runId: string,
    document: QueryBundleDocument,
  ): Promise<QueryBundleDocument> {
    return this.json(`/runs/${runId}/queries`, {
      method: 'PUT',
      body: JSON.stringify(document),
    });
  }

  getResults(runId: string, query: ResultsQuery = {}): Promise<ResultsPage> {
    const params = new URLSearchParams();
    if (query.view) params.set('view', query.view);
    if (query.source) params.set('source', query.source);
    if (query.offset !== undefined) params.set('offset', String(query.offset));
    if (query.limit !== undefined) params.set('limit', String(query.limit));
    const suffix = params.toString() ? `?${params.toString()}` : '';
    return this.json(`/runs/${runId}/results${suffix}`);
  }

  submitLabel(
    runId: string,
    itemId: string,
    label: string,
    labeler = 'webui',
  ): Promise<LabelRecord> {
    return this.json(`/runs/${runId}/labels`, {
      method: 'POST',
      body: JSON.stringify({ item_id: itemId, label, labeler }),
    });
  }

  async exportRun(runId: string, format: 'jsonl' | 'csv'): Promise<string> {
    const response = await this.request(
      `/runs/${runId}/export?format=${format}`,
    );
    return response.text();
  }
}
