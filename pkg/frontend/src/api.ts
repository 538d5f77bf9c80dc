// Typed fetch client for the /v1 scoring API. Every response body is parsed
// through the zod schemas so a drifting server fails loudly here, not deep in
// a view.

import {
  closeRoundResponseSchema,
  createSessionResponseSchema,
  feedbackResponseSchema,
  openRoundResponseSchema,
  roundHistoryResponseSchema,
  sessionStatusSchema,
  submitResponseSchema,
} from "./schemas";
import type {
  CloseRoundResponse,
  CreateSessionRequest,
  CreateSessionResponse,
  FeedbackResponse,
  OpenRoundResponse,
  RoundHistoryResponse,
  SessionStatus,
  SubmitRequest,
  SubmitResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }

  /** 401: the token is stale or wrong; the UI should prompt for re-auth. */
  get needsReauth(): boolean {
    return this.status === 401;
  }
}

async function request<T>(
  url: string,
  token: string,
  parse: (body: unknown) => T,
  init: RequestInit = {},
): Promise<T> {
  const resp = await fetch(url, {
    ...init,
    headers: {
      Authorization: `Bearer ${token}`,
      "Content-Type": "application/json",
      ...(init.headers ?? {}),
    },
  });
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return parse(await resp.json());
}

export class ExpertApi {
  constructor(
    readonly baseUrl: string,
    readonly sessionId: string,
    readonly token: string,
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}/v1/sessions/${this.sessionId}${path}`;
  }

  openSamples(): Promise<OpenRoundResponse> {
    return request(this.url("/open"), this.token, (b) =>
      openRoundResponseSchema.parse(b),
    );
  }

  submitScores(payload: SubmitRequest): Promise<SubmitResponse> {
    return request(
      this.url("/scores"),
      this.token,
      (b) => submitResponseSchema.parse(b),
      { method: "PUT", body: JSON.stringify(payload) },
    );
  }

  feedback(round: number): Promise<FeedbackResponse> {
    return request(this.url(`/feedback/${round}`), this.token, (b) =>
      feedbackResponseSchema.parse(b),
    );
  }
}

export class AdminApi {
  constructor(
    readonly baseUrl: string,
    readonly token: string,
  ) {}

  createSession(req: CreateSessionRequest): Promise<CreateSessionResponse> {
    return request(
      `${this.baseUrl}/v1/sessions`,
      this.token,
      (b) => createSessionResponseSchema.parse(b),
      { method: "POST", body: JSON.stringify(req) },
    );
  }

  status(sessionId: string): Promise<SessionStatus> {
    return request(
      `${this.baseUrl}/v1/sessions/${sessionId}/status`,
      this.token,
      (b) => sessionStatusSchema.parse(b),
    );
  }

  roundHistory(sessionId: string): Promise<RoundHistoryResponse> {
    return request(
      `${this.baseUrl}/v1/sessions/${sessionId}/rounds`,
      this.token,
      (b) => roundHistoryResponseSchema.parse(b),
    );
  }

  closeRound(sessionId: string, round: number): Promise<CloseRoundResponse> {
    return request(
      `${this.baseUrl}/v1/sessions/${sessionId}/rounds/${round}/close`,
      this.token,
      (b) => closeRoundResponseSchema.parse(b),
      { method: "POST" },
    );
  }

  /** Label CSV (sample_id,label,forced); 409 until every sample is labeled. */
  async exportLabels(sessionId: string): Promise<string> {
    const resp = await fetch(
      `${this.baseUrl}/v1/sessions/${sessionId}/labels`,
      { headers: { Authorization: `Bearer ${this.token}` } },
    );
    if (!resp.ok) {
      const body = (await resp.json().catch(() => ({}))) as { detail?: string };
      throw new ApiError(resp.status, body.detail ?? resp.statusText);
    }
    return resp.text();
  }
}
