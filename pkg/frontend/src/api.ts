/**
 * Typed client for the autojoin HTTP service.
 *
 * Every endpoint returns parsed JSON; non-2xx responses become ApiError
 * carrying the service's machine-readable code alongside the message.
 */

/** One column of a table, with its inferred uniqueness class. */
export interface ColumnInfo {
  name: string;
  class: 'one' | 'many' | null;
}

/** One table as reported by GET /api/tables. */
export interface TableInfo {
  name: string;
  alias: string | null;
  row_count: number;
  columns: ColumnInfo[];
}

export interface TablesResponse {
  tables: TableInfo[];
}

/** One join step: a qualified column joined to a qualified column. */
export interface PlanStep {
  from: string;
  to: string;
  link_id: string;
}

/** One executable join sequence produced by the planner. */
export interface PlanSequence {
  origin: string;
  steps: PlanStep[];
  tables: string[];
}

export interface PlanDiagnostics {
  origins_considered: string[];
  origins_rejected: string[];
  origins_accepted: string[];
  cache_hits: number;
  cache_misses: number;
  combination_cap_exceeded: string[];
  truncated: boolean;
}

export interface PlanResponse {
  targets: string[];
  sequences: PlanSequence[];
  diagnostics: PlanDiagnostics;
}

export interface FilterSpec {
  column: string;
  op: string;
  value: string | number;
}

export interface QueryRequest {
  select?: string[];
  targets?: string[];
  filters?: FilterSpec[];
  policy?: string;
  join_type?: string;
}

/** Execution outcome for one emitted SQL statement. */
export interface QueryResult {
  sql: string;
  params: unknown[];
  sequences: PlanSequence[];
  columns: string[];
  rows: unknown[][];
  row_count: number;
  chosen_row_count: number | null;
}

export interface QueryResponse {
  policy: string;
  join_type: string;
  plan: PlanResponse;
  results: QueryResult[];
}

/** Error body shape shared by every service endpoint. */
interface ErrorBody {
  code?: string;
  message?: string;
  detail?: unknown;
}

/** A failed request, keeping the service's error code and HTTP status. */
export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
    readonly detail?: unknown,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  /** List tables with aliases, row counts, and column classes. */
  tables(): Promise<TablesResponse> {
    return this.request<TablesResponse>('/api/tables');
  }

  /** Synthesize the minimal join sequences covering the target tables. */
  plan(targets: string[]): Promise<PlanResponse> {
    return this.request<PlanResponse>('/api/plan', {
      method: 'POST',
      body: JSON.stringify({ targets }),
    });
  }

  /** Plan, translate, and execute a query. */
  query(request: QueryRequest): Promise<QueryResponse> {
    return this.request<QueryResponse>('/api/query', {
      method: 'POST',
      body: JSON.stringify(request),
    });
  }

  private async request<T>(path: string, init: RequestInit = {}): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, {
        ...init,
        headers: { 'Content-Type': 'application/json', ...(init.headers ?? {}) },
      });
    } catch (error) {
      const reason = error instanceof Error ? error.message : String(error);
      throw new ApiError('NetworkError', `service unreachable: ${reason}`, 0);
    }
    if (!response.ok) {
      const body = (await response.json().catch(() => ({}))) as ErrorBody;
      throw new ApiError(
        body.code ?? 'HttpError',
        body.message ?? `request failed with status ${String(response.status)}`,
        response.status,
        body.detail,
      );
    }
    return response.json() as Promise<T>;
  }
}
