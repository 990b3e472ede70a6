/** Thin fetch client for the scoring API. */

import type {
  ApiErrorBody,
  FeedbackResponse,
  NetworkSaResponse,
  ThreatDetail,
  ThreatList,
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

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface ConsoleApi {
  listThreats(status?: "active" | "resolved"): Promise<ThreatList>;
  getThreat(tid: string): Promise<ThreatDetail>;
  submitFeedback(tid: string): Promise<FeedbackResponse>;
  networkSa(): Promise<NetworkSaResponse>;
}

function defaultFetch(): FetchLike {
  return (url, init) => globalThis.fetch(url, init);
}

/**
 * Build a client against `baseUrl` ("" means same origin). Non-2xx
 * responses become ApiError carrying the server's error code so callers
 * can branch on it without string matching.
 */
export function createApi(baseUrl: string, fetchFn: FetchLike = defaultFetch()): ConsoleApi {
  const request = async <T>(method: string, path: string): Promise<T> => {
    const response = await fetchFn(baseUrl + path, {
      method,
      headers: { accept: "application/json" },
    });
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      body = null;
    }
    if (!response.ok) {
      const envelope = body as ApiErrorBody | null;
      const code = envelope?.error?.code ?? `http_${response.status}`;
      const message = envelope?.error?.message ?? response.statusText;
      throw new ApiError(response.status, code, message);
    }
    return body as T;
  };

  return {
    listThreats: (status = "active") =>
      request<ThreatList>("GET", `/api/threats?status=${status}&sort=priority`),
    getThreat: (tid) => request<ThreatDetail>("GET", `/api/threats/${encodeURIComponent(tid)}`),
    submitFeedback: (tid) =>
      request<FeedbackResponse>("POST", `/api/threats/${encodeURIComponent(tid)}/feedback`),
    networkSa: () => request<NetworkSaResponse>("GET", "/api/network-sa"),
  };
}
