// Typed client for the session endpoints. The fetch implementation is
// injectable so tests can run against an in-memory stub service.

import type {
  CreateSessionRequest,
  CreateSessionResponse,
  ErrorBody,
  SessionState,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ErrorBody,
  ) {
    super(body.message ?? body.error ?? `HTTP ${status}`);
    this.name = "ApiError";
  }

  get kind(): string {
    return this.body.error ?? "unknown";
  }
}

export class SessionApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body !== undefined ? { "Content-Type": "application/json" } : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const text = await response.text();
    const parsed = text ? JSON.parse(text) : {};
    if (!response.ok) {
      throw new ApiError(response.status, parsed as ErrorBody);
    }
    return parsed as T;
  }

  createSession(req: CreateSessionRequest): Promise<CreateSessionResponse> {
    return this.request("POST", "/session", req);
  }

  getState(sessionId: string): Promise<SessionState> {
    return this.request("GET", `/session/${sessionId}/state`);
  }

  advance(sessionId: string): Promise<SessionState> {
    return this.request("POST", `/session/${sessionId}/advance`);
  }

  submitSam(
    sessionId: string,
    valence: number,
    arousal: number,
    nonce: string,
  ): Promise<SessionState> {
    return this.request("POST", `/session/${sessionId}/sam`, { valence, arousal, nonce });
  }

  submitIos(sessionId: string, ios: number, nonce: string): Promise<SessionState> {
    return this.request("POST", `/session/${sessionId}/ios`, { ios, nonce });
  }
}
