import { describe, expect, it } from "vitest";

import { ApiError, type ConsoleApi } from "../src/api.js";
import { STALE_AFTER_MISSES, TriageConsole } from "../src/triage.js";
import type { FeedbackResponse, ThreatRow } from "../src/types.js";
import { ZERO_SA, deferred } from "./helpers.js";

function apiStub(overrides: Partial<ConsoleApi> = {}): ConsoleApi {
  return {
    listThreats: async () => ({ threats: [] }),
    getThreat: async () => {
      throw new ApiError(404, "unknown_threat", "no such threat");
    },
    submitFeedback: async () => {
      throw new ApiError(404, "unknown_threat", "no such threat");
    },
    networkSa: async () => ({ sa: ZERO_SA, history: [] }),
    ...overrides,
  };
}

function row(tid: string, priority = 1.0): ThreatRow {
  return {
    tid,
    type: "incident",
    name: "synthetic",
    sid: "s1",
    status: "active",
    priority,
    sa: { definite: priority, procedural: 0, network: 0, infrastructural: 0 },
    received_at: 0,
  };
}

describe("poll", () => {
  it("an empty active set is an empty queue with a zero headline", async () => {
    const model = new TriageConsole(apiStub());
    expect(await model.poll()).toBe(true);
    const snap = model.snapshot();
    expect(snap.rows).toEqual([]);
    expect(snap.headline).toEqual(ZERO_SA);
    expect(snap.online).toBe(true);
    expect(snap.everPolled).toBe(true);
  });

  it("misses accumulate to the stale threshold and reset on recovery", async () => {
    let healthy = false;
    const model = new TriageConsole(
      apiStub({
        listThreats: async () => {
          if (!healthy) throw new TypeError("fetch failed");
          return { threats: [row("t1")] };
        },
      }),
    );
    for (let i = 1; i <= STALE_AFTER_MISSES; i++) {
      expect(await model.poll()).toBe(false);
      expect(model.snapshot().missedPolls).toBe(i);
      expect(model.snapshot().stale).toBe(i >= STALE_AFTER_MISSES);
    }
    healthy = true;
    expect(await model.poll()).toBe(true);
    expect(model.snapshot().missedPolls).toBe(0);
    expect(model.snapshot().stale).toBe(false);
  });
});

describe("feedback", () => {
  it("resolving the only active threat returns the headline to zero", async () => {
    const only = row("t1", 4.2);
    let resolved = false;
    const model = new TriageConsole(
      apiStub({
        listThreats: async () => ({ threats: resolved ? [] : [only] }),
        networkSa: async () => ({ sa: resolved ? ZERO_SA : only.sa, history: [] }),
        submitFeedback: async (tid) => {
          resolved = true;
          return { tid, network_sa: ZERO_SA };
        },
      }),
    );
    await model.poll();
    expect(model.snapshot().headline).toEqual(only.sa);

    expect(await model.submitFeedback("t1")).toBe("resolved");
    const snap = model.snapshot();
    expect(snap.rows).toEqual([]);
    expect(snap.headline).toEqual(ZERO_SA);
  });

  it("the in-flight guard is per threat, not global", async () => {
    const gateA = deferred<FeedbackResponse>();
    const gateB = deferred<FeedbackResponse>();
    const model = new TriageConsole(
      apiStub({
        submitFeedback: (tid) => (tid === "a" ? gateA.promise : gateB.promise),
      }),
    );

    const a = model.submitFeedback("a");
    const b = model.submitFeedback("b");
    expect(model.snapshot().inFlight.has("a")).toBe(true);
    expect(model.snapshot().inFlight.has("b")).toBe(true);
    expect(await model.submitFeedback("a")).toBe("in_flight");

    gateA.resolve({ tid: "a", network_sa: ZERO_SA });
    gateB.resolve({ tid: "b", network_sa: ZERO_SA });
    expect(await a).toBe("resolved");
    expect(await b).toBe("resolved");
    expect(model.snapshot().inFlight.size).toBe(0);
  });

  it("a transport failure reports, toasts, and releases the guard", async () => {
    const model = new TriageConsole(
      apiStub({
        submitFeedback: async () => {
          throw new TypeError("fetch failed");
        },
      }),
    );
    expect(await model.submitFeedback("t9")).toBe("failed");
    const snap = model.snapshot();
    expect(snap.toast).toContain("t9");
    expect(snap.inFlight.size).toBe(0);

    model.dismissToast();
    expect(model.snapshot().toast).toBeNull();
  });

  it("resolving the selected threat closes its detail pane", async () => {
    const detail = {
      ...row("t1"),
      graphs: {
        definite: { nodes: ["s1"], arcs: [] },
        procedural: { origin: "o1", targets: [] },
        network: { origin: "o1", targets: [] },
        infrastructural: { origin: "o1", targets: [] },
      },
    };
    const model = new TriageConsole(
      apiStub({
        getThreat: async () => detail,
        submitFeedback: async (tid) => ({ tid, network_sa: ZERO_SA }),
      }),
    );
    await model.select("t1");
    expect(model.snapshot().selected?.tid).toBe("t1");

    await model.submitFeedback("t1");
    expect(model.snapshot().selected).toBeNull();
  });
});

describe("selection", () => {
  it("a failed lookup becomes a toast, not a crash", async () => {
    const model = new TriageConsole(apiStub());
    await model.select("missing");
    const snap = model.snapshot();
    expect(snap.selected).toBeNull();
    expect(snap.toast).toContain("unknown_threat");
  });

  it("clearSelection drops the pane", async () => {
    const detail = {
      ...row("t1"),
      graphs: {
        definite: { nodes: [], arcs: [] },
        procedural: { origin: "o1", targets: [] },
        network: { origin: "o1", targets: [] },
        infrastructural: { origin: "o1", targets: [] },
      },
    };
    const model = new TriageConsole(apiStub({ getThreat: async () => detail }));
    await model.select("t1");
    model.clearSelection();
    expect(model.snapshot().selected).toBeNull();
  });
});
