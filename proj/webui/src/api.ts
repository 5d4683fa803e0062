import type {
  ApiErrorBody,
  Comparison,
  CompositionPlan,
  CompositionRequest,
  Envelope,
  Health,
  QueryPage,
} from "./types.js";

export type ApiResult<T> =
  | { ok: true; status: number; body: T }
  | { ok: false; status: number; error: ApiErrorBody; body: unknown };

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

// Thin client over /api/v1. Every method returns the decoded body untouched;
// no filtering or solving happens on this side.
export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl = "", fetchImpl: FetchLike = (u, i) => fetch(u, i)) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl;
  }

  health(signal?: AbortSignal): Promise<ApiResult<Health>> {
    return this.send("GET", "/api/v1/health", undefined, signal);
  }

  query(mql: string, page: { offset?: number; limit?: number } = {}, signal?: AbortSignal): Promise<ApiResult<QueryPage>> {
    const params = new URLSearchParams();
    if (page.offset !== undefined) params.set("offset", String(page.offset));
    if (page.limit !== undefined) params.set("limit", String(page.limit));
    const qs = params.toString();
    return this.send("POST", "/api/v1/query" + (qs ? "?" + qs : ""), { mql }, signal);
  }

  record(kind: string, id: string, signal?: AbortSignal): Promise<ApiResult<Envelope>> {
    return this.send("GET", `/api/v1/records/${encodeURIComponent(kind)}/${encodeURIComponent(id)}`, undefined, signal);
  }

  compare(ids: string[], signal?: AbortSignal): Promise<ApiResult<Comparison>> {
    return this.send("GET", "/api/v1/compare?ids=" + ids.map(encodeURIComponent).join(","), undefined, signal);
  }

  compose(request: CompositionRequest, signal?: AbortSignal): Promise<ApiResult<CompositionPlan>> {
    return this.send("POST", "/api/v1/compose", request, signal);
  }

  private async send<T>(method: string, path: string, body: unknown, signal?: AbortSignal): Promise<ApiResult<T>> {
    const init: RequestInit = { method, signal };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "Content-Type": "application/json" };
    }
    const res = await this.fetchImpl(this.baseUrl + path, init);
    const decoded: unknown = await res.json();
    if (res.ok) return { ok: true, status: res.status, body: decoded as T };
    const error = (decoded as { error?: ApiErrorBody }).error ?? { code: "HTTP_" + res.status, message: res.statusText };
    return { ok: false, status: res.status, error, body: decoded };
  }
}
