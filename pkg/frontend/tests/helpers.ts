/**
 * Fixture loading plus a scripted fetch that mimics the API from the
 * recorded responses in tests/fixtures/. Regenerate those with
 * tests/fixtures/record.py when the engine or sample data changes.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";
import type {
  ApiErrorBody,
  FeedbackResponse,
  NetworkSaResponse,
  SaComponents,
  ThreatDetail,
  ThreatList,
} from "../src/types.js";

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURE_DIR, `${name}.json`), "utf8")) as T;
}

export const ZERO_SA: SaComponents = {
  definite: 0,
  procedural: 0,
  network: 0,
  infrastructural: 0,
};

export interface RecordedCall {
  method: string;
  url: string;
}

export interface ReplayServer {
  fetchFn: FetchLike;
  calls: RecordedCall[];
  posts(): RecordedCall[];
  /** Flip the top threat to resolved server-side, as if another analyst won the race. */
  resolveTop(): void;
  top: string;
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

/**
 * Replays the recorded 25-threat session: the ranked queue and headline
 * before feedback, the feedback confirmation for the top threat, then
 * the reduced state. A repeat feedback for that tid earns the recorded
 * 409 body, exactly like the live server.
 */
export function replayServer(): ReplayServer {
  const before = fixture<ThreatList>("threats_ranked");
  const after = fixture<ThreatList>("threats_after_feedback");
  const netBefore = fixture<NetworkSaResponse>("network_sa");
  const netAfter = fixture<NetworkSaResponse>("network_sa_after");
  const detail = fixture<ThreatDetail>("threat_top_detail");
  const feedback = fixture<FeedbackResponse>("feedback_top");
  const conflict = fixture<ApiErrorBody>("feedback_409");
  const top = before.threats[0].tid;

  let resolved = false;
  const calls: RecordedCall[] = [];

  const fetchFn: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    calls.push({ method, url });
    const { pathname } = new URL(url, "http://fixtures.test");
    if (method === "POST" && pathname === `/api/threats/${top}/feedback`) {
      if (resolved) return jsonResponse(409, conflict);
      resolved = true;
      return jsonResponse(200, feedback);
    }
    if (method === "GET" && pathname === "/api/threats") {
      return jsonResponse(200, resolved ? after : before);
    }
    if (method === "GET" && pathname === "/api/network-sa") {
      return jsonResponse(200, resolved ? netAfter : netBefore);
    }
    if (method === "GET" && pathname === `/api/threats/${top}`) {
      return jsonResponse(200, detail);
    }
    return jsonResponse(404, { error: { code: "unknown_route", message: pathname } });
  };

  return {
    fetchFn,
    calls,
    posts: () => calls.filter((c) => c.method === "POST"),
    resolveTop: () => {
      resolved = true;
    },
    top,
  };
}

export interface Deferred<T> {
  promise: Promise<T>;
  resolve(value: T): void;
  reject(err: unknown): void;
}

export function deferred<T>(): Deferred<T> {
  let resolve!: (value: T) => void;
  let reject!: (err: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}
