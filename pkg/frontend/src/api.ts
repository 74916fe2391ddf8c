import type {
  ExportDoc,
  Favored,
  NextPair,
  ServiceError,
  SessionCreated,
  SessionStatus,
  StudyDoc,
} from "./types.js";

/** Error carrying the service's structured {code, message} body. */
export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, body: ServiceError) {
    super(body.message);
    this.code = body.code;
    this.status = status;
  }
}

/** Network-level failure (service unreachable); submissions can be retried. */
export class OfflineError extends Error {
  constructor(cause: unknown) {
    super(`service unreachable: ${String(cause)}`);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, {
        method,
        headers: body === undefined ? {} : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new OfflineError(err);
    }
    if (!response.ok) {
      let payload: ServiceError;
      try {
        payload = (await response.json()) as ServiceError;
      } catch {
        payload = { code: "http_error", message: `HTTP ${response.status}` };
      }
      throw new ApiError(response.status, payload);
    }
    return (await response.json()) as T;
  }

  study(): Promise<StudyDoc> {
    return this.request<StudyDoc>("GET", "/study");
  }

  createSession(respondent: Record<string, unknown> = {}, seed?: number): Promise<SessionCreated> {
    return this.request<SessionCreated>("POST", "/sessions", { respondent, seed: seed ?? null });
  }

  nextPair(sessionId: string): Promise<NextPair> {
    return this.request<NextPair>("GET", `/sessions/${sessionId}/next`);
  }

  submitJudgment(
    sessionId: string,
    pairIndex: number,
    intensity: number,
    favored: Favored,
  ): Promise<SessionStatus> {
    return this.request<SessionStatus>("POST", `/sessions/${sessionId}/judgments`, {
      pair_index: pairIndex,
      intensity,
      favored,
    });
  }

  status(sessionId: string): Promise<SessionStatus> {
    return this.request<SessionStatus>("GET", `/sessions/${sessionId}/status`);
  }

  review(sessionId: string, decision: "accept" | "revise", pairs: number[][] = []): Promise<SessionStatus> {
    return this.request<SessionStatus>("POST", `/sessions/${sessionId}/review`, {
      decision,
      pairs,
    });
  }

  exportAll(partial = false): Promise<ExportDoc> {
    return this.request<ExportDoc>("GET", `/export?partial=${partial}`);
  }
}
