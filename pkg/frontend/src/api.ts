/** Thin typed client for the session API. The fetch function is injectable
 * so tests can run against recorded fixtures. */

import type {
  AlignmentsPayload,
  ItemsPayload,
  LayoutPayload,
  ManualPairPayload,
  MappersPayload,
  MergePayload,
  ProjectionPayload,
  SessionSummary,
  Side,
  SummaryPayload,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  code: string;
  detail: unknown;

  constructor(code: string, message: string, detail: unknown = null) {
    super(message);
    this.code = code;
    this.detail = detail;
  }
}

export class ApiClient {
  private base: string;
  private fetchFn: FetchLike;

  constructor(base = "", fetchFn: FetchLike = (...args) => fetch(...args)) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(`${this.base}${path}`, init);
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(payload.code ?? "http-error", payload.message ?? response.statusText, payload.detail);
    }
    return payload as T;
  }

  health(): Promise<{ status: string; version: string }> {
    return this.request("GET", "/health");
  }

  createSession(body: Record<string, unknown>): Promise<SessionSummary> {
    return this.request("POST", "/sessions", body);
  }

  session(sid: string): Promise<SessionSummary> {
    return this.request("GET", `/sessions/${sid}`);
  }

  mappers(sid: string): Promise<MappersPayload> {
    return this.request("GET", `/sessions/${sid}/mappers`);
  }

  layout(sid: string, lambda?: number): Promise<LayoutPayload> {
    const query = lambda === undefined ? "" : `?lambda=${encodeURIComponent(lambda)}`;
    return this.request("GET", `/sessions/${sid}/layout${query}`);
  }

  setLambda(sid: string, lambda: number): Promise<LayoutPayload> {
    return this.request("PUT", `/sessions/${sid}/lambda`, { lambda });
  }

  setAlignmentParams(sid: string, params: Record<string, unknown>): Promise<AlignmentsPayload> {
    return this.request("PUT", `/sessions/${sid}/alignment-params`, params);
  }

  alignments(sid: string): Promise<AlignmentsPayload> {
    return this.request("GET", `/sessions/${sid}/alignments`);
  }

  merge(sid: string, pairId: number, strategy: string, step?: number): Promise<MergePayload> {
    const stepPart = step === undefined ? "" : `&step=${step}`;
    return this.request("GET", `/sessions/${sid}/alignments/${pairId}/merge?strategy=${strategy}${stepPart}`);
  }

  items(sid: string, selector: string): Promise<ItemsPayload> {
    return this.request("GET", `/sessions/${sid}/items?selector=${encodeURIComponent(selector)}`);
  }

  summarize(sid: string, items: string[]): Promise<SummaryPayload> {
    return this.request("POST", `/sessions/${sid}/summarize`, { items });
  }

  manualPair(sid: string, side: Side, nodes: number[]): Promise<ManualPairPayload> {
    return this.request("POST", `/sessions/${sid}/manual-pair`, { side, nodes });
  }

  projection(sid: string): Promise<ProjectionPayload> {
    return this.request("GET", `/sessions/${sid}/projection`);
  }
}
