// Typed client for the haibench session service, with a FIFO retry queue
// for event posts: a network failure keeps the batch queued with its
// timestamps unchanged, while a 4xx/5xx response surfaces as an ApiError
// (retrying a rejected batch would never succeed).

import { SessionClock } from "./clock.js";
import type {
  ApiErrorBody,
  ClientEvent,
  CompleteResponse,
  CreatedSession,
  LikertItem,
  PostEventsResponse,
  TrialView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = typeof fetch;

async function parseError(res: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `${res.status}`;
  try {
    const body = (await res.json()) as ApiErrorBody;
    if (body && body.error) {
      code = body.error.code;
      message = body.error.message;
    }
  } catch {
    // keep the generic message
  }
  return new ApiError(res.status, code, message);
}

export class ApiClient {
  readonly clock = new SessionClock();
  private sessionId: string | null = null;
  private pending: ClientEvent[][] = [];
  private flushing = false;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  get session(): string {
    if (!this.sessionId) throw new Error("no active session");
    return this.sessionId;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  async createSession(subject: string): Promise<CreatedSession> {
    const sent = performance.now();
    const created = await this.request<CreatedSession>("/sessions", {
      method: "POST",
      body: JSON.stringify({ subject }),
    });
    this.clock.anchorBetween(sent, performance.now());
    this.sessionId = created.session_id;
    return created;
  }

  async getTrial(n: number): Promise<TrialView> {
    return this.request<TrialView>(`/sessions/${this.session}/trials/${n}`);
  }

  /** Queue a batch and flush; timestamps are never rewritten on retry. */
  async postEvents(events: ClientEvent[]): Promise<PostEventsResponse | null> {
    this.pending.push(events);
    return this.flush();
  }

  pendingBatches(): number {
    return this.pending.length;
  }

  /** Try to drain the queue in order; stops (keeping the rest queued) on
   * the first network failure. Returns the last successful response. */
  async flush(): Promise<PostEventsResponse | null> {
    const sid = this.session; // throws before any I/O when no session exists
    if (this.flushing) return null;
    this.flushing = true;
    let last: PostEventsResponse | null = null;
    try {
      while (this.pending.length > 0) {
        const batch = this.pending[0];
        let res: PostEventsResponse;
        try {
          res = await this.request<PostEventsResponse>(
            `/sessions/${sid}/events`,
            { method: "POST", body: JSON.stringify({ events: batch }) },
          );
        } catch (err) {
          if (err instanceof ApiError) {
            this.pending.shift();
            throw err;
          }
          // Network failure: leave the batch queued, unchanged.
          return last;
        }
        this.pending.shift();
        last = res;
      }
      return last;
    } finally {
      this.flushing = false;
    }
  }

  async postQuestionnaire(items: LikertItem[]): Promise<void> {
    await this.request(`/sessions/${this.session}/questionnaire`, {
      method: "POST",
      body: JSON.stringify({ items }),
    });
  }

  async complete(): Promise<CompleteResponse> {
    return this.request<CompleteResponse>(`/sessions/${this.session}/complete`, {
      method: "POST",
    });
  }
}
