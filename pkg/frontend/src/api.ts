// Typed client for the annotation HTTP API. All network access in the UI
// goes through this module so tests can inject a stub fetch.

import type {
  AnnotationItem,
  EvalReport,
  ExportResponse,
  FeedbackKind,
  IngestionReport,
  Project,
} from './types';

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.name = 'ApiError';
    this.code = code;
    this.status = status;
  }
}

export interface ApiClientOptions {
  baseUrl?: string;
  token?: string;
  fetchImpl?: FetchLike;
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly token: string;
  private readonly fetchImpl: FetchLike;

  constructor(options: ApiClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? '').replace(/\/$/, '');
    this.token = options.token ?? '';
    this.fetchImpl = options.fetchImpl ?? fetch.bind(globalThis);
  }

  private async request<T>(
    method: 'GET' | 'POST',
    path: string,
    body?: unknown,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) {
      headers['Content-Type'] = 'application/json';
    }
    if (this.token) {
      headers['Authorization'] = `Bearer ${this.token}`;
    }
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = 'http_error';
      let message = `HTTP ${response.status}`;
      try {
        const doc = await response.json();
        if (doc && typeof doc.code === 'string') code = doc.code;
        if (doc && typeof doc.message === 'string') message = doc.message;
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ApiError(code, message, response.status);
    }
    return response.json() as Promise<T>;
  }

  health(): Promise<{ status: string; projects: number }> {
    return this.request('GET', '/api/health');
  }

  listProjects(): Promise<Project[]> {
    return this.request('GET', '/api/projects');
  }

  getProject(projectId: string): Promise<Project> {
    return this.request('GET', `/api/projects/${projectId}`);
  }

  listItems(projectId: string, state?: string): Promise<AnnotationItem[]> {
    const query = state ? `?state=${encodeURIComponent(state)}` : '';
    return this.request('GET', `/api/projects/${projectId}/items${query}`);
  }

  getItem(itemId: string): Promise<AnnotationItem> {
    return this.request('GET', `/api/items/${itemId}`);
  }

  createProject(name: string, dialect = 'generic'): Promise<Project> {
    return this.request('POST', '/api/projects', { name, dialect });
  }

  ingestSchema(
    projectId: string,
    data: string,
    format?: string,
  ): Promise<unknown> {
    return this.request('POST', `/api/projects/${projectId}/schema`, {
      data,
      format: format ?? null,
    });
  }

  ingestQueries(
    projectId: string,
    data: string,
    sourceTag = '',
  ): Promise<IngestionReport> {
    return this.request('POST', `/api/projects/${projectId}/queries`, {
      data,
      source_tag: sourceTag,
    });
  }

  next(projectId: string, annotatorId: string): Promise<AnnotationItem> {
    return this.request('POST', `/api/projects/${projectId}/next`, {
      annotator_id: annotatorId,
    });
  }

  feedback(
    itemId: string,
    annotatorId: string,
    kind: FeedbackKind,
    payload: Record<string, unknown> = {},
  ): Promise<AnnotationItem> {
    return this.request('POST', `/api/items/${itemId}/feedback`, {
      annotator_id: annotatorId,
      kind,
      payload,
    });
  }

  accept(
    itemId: string,
    annotatorId: string,
    candidateId: string,
    finalText?: string,
  ): Promise<AnnotationItem> {
    return this.request('POST', `/api/items/${itemId}/accept`, {
      annotator_id: annotatorId,
      candidate_id: candidateId,
      final_text: finalText ?? null,
    });
  }

  exportProject(projectId: string): Promise<ExportResponse> {
    return this.request('POST', `/api/projects/${projectId}/export`);
  }

  evaluate(projectId: string, dbDir: string): Promise<EvalReport> {
    return this.request('POST', `/api/projects/${projectId}/evaluate`, {
      db_dir: dbDir,
    });
  }
}
