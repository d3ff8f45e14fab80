/** Typed client for the prediction-game HTTP API.
 *
 * Every request is appended to `requestLog` before it is dispatched, so tests
 * can assert protocol ordering (a commit must precede each reveal).  Commits
 * carry an idempotency token: retrying after a network failure with the same
 * token returns the original acknowledgment instead of a 409.
 */

export interface PhiSpec {
  kind: string;
  [key: string]: unknown;
}

export interface CreateSessionBody {
  phi?: PhiSpec;
  n?: number;
  seed?: number;
}

export interface RoundRecord {
  t: number;
  q: number;
  prediction: number;
  outcome: number;
  cum_mistakes: number;
}

export interface SessionView {
  id: string;
  n: number;
  round: number;
  rounds_left: number;
  machine_score: number;
  machine_win_rate: number;
  done: boolean;
  committed: boolean;
  history: RoundRecord[];
}

export interface CommitAck {
  ack: string;
  round: number;
}

export interface RevealResult {
  round: number;
  prediction: number;
  outcome: number;
  machine_correct: boolean;
  machine_win_rate: number;
  rounds_left: number;
}

export interface LoggedRequest {
  method: string;
  path: string;
  body?: unknown;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

let tokenCounter = 0;

export function freshToken(): string {
  tokenCounter += 1;
  return `c${tokenCounter}-${Date.now().toString(36)}`;
}

export class SessionClient {
  readonly requestLog: LoggedRequest[] = [];

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (...args) =>
      fetch(...(args as Parameters<typeof fetch>)),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    this.requestLog.push({ method, path, body });
    const resp = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const data = (await resp.json()) as Record<string, unknown>;
    if (resp.status >= 400) {
      throw new ApiError(resp.status, String(data["detail"] ?? "request failed"));
    }
    return data as T;
  }

  createSession(body: CreateSessionBody): Promise<SessionView> {
    return this.request("POST", "/api/sessions", body);
  }

  getSession(id: string): Promise<SessionView> {
    return this.request("GET", `/api/sessions/${id}`);
  }

  /** Commit with idempotent retries; network errors re-send the same token. */
  async commit(id: string, retries = 2): Promise<CommitAck> {
    const token = freshToken();
    let lastError: unknown;
    for (let attempt = 0; attempt <= retries; attempt += 1) {
      try {
        return await this.request<CommitAck>("POST", `/api/sessions/${id}/commit`, { token });
      } catch (err) {
        if (err instanceof ApiError) throw err; // protocol error: do not retry
        lastError = err;
      }
    }
    throw lastError;
  }

  reveal(id: string, outcome: 1 | -1): Promise<RevealResult> {
    return this.request("POST", `/api/sessions/${id}/reveal`, { outcome });
  }
}
