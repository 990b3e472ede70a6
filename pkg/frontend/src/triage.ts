/**
 * Console state. Everything on screen comes straight out of the latest
 * API responses: the queue keeps the server's ranking order, the headline
 * vector is whatever the server last reported, and feedback never touches
 * local rows, it asks the server and then re-reads the queue.
 */

import { ApiError, type ConsoleApi } from "./api.js";
import type { HistoryPoint, SaComponents, ThreatDetail, ThreatRow } from "./types.js";

/** Consecutive missed polls before the retained data is flagged as stale. */
export const STALE_AFTER_MISSES = 3;

export type FeedbackOutcome = "resolved" | "rejected" | "failed" | "in_flight";

export interface TriageSnapshot {
  rows: readonly ThreatRow[];
  headline: SaComponents | null;
  history: readonly HistoryPoint[];
  online: boolean;
  everPolled: boolean;
  missedPolls: number;
  stale: boolean;
  selected: ThreatDetail | null;
  toast: string | null;
  inFlight: ReadonlySet<string>;
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.code}: ${err.message}`;
  if (err instanceof Error && err.message) return err.message;
  return "request failed";
}

export class TriageConsole {
  private rows: ThreatRow[] = [];
  private headline: SaComponents | null = null;
  private history: HistoryPoint[] = [];
  private online = false;
  private everPolled = false;
  private missedPolls = 0;
  private selected: ThreatDetail | null = null;
  private toast: string | null = null;
  private readonly inFlight = new Set<string>();

  constructor(private readonly api: ConsoleApi) {}

  snapshot(): TriageSnapshot {
    return {
      rows: this.rows,
      headline: this.headline,
      history: this.history,
      online: this.online,
      everPolled: this.everPolled,
      missedPolls: this.missedPolls,
      stale: this.stale,
      selected: this.selected,
      toast: this.toast,
      inFlight: this.inFlight,
    };
  }

  get stale(): boolean {
    return this.missedPolls >= STALE_AFTER_MISSES;
  }

  /**
   * Refresh the queue and the headline vector. A failed poll keeps the
   * previous data on screen and bumps the missed counter; it never throws.
   */
  async poll(): Promise<boolean> {
    try {
      const [list, net] = await Promise.all([this.api.listThreats("active"), this.api.networkSa()]);
      this.rows = list.threats;
      this.headline = net.sa;
      this.history = net.history;
      this.online = true;
      this.everPolled = true;
      this.missedPolls = 0;
      return true;
    } catch {
      this.online = false;
      this.missedPolls += 1;
      return false;
    }
  }

  async select(tid: string): Promise<void> {
    try {
      this.selected = await this.api.getThreat(tid);
    } catch (err) {
      this.toast = describe(err);
    }
  }

  clearSelection(): void {
    this.selected = null;
  }

  dismissToast(): void {
    this.toast = null;
  }

  /**
   * Report a threat as mitigated. At most one request per threat is in
   * flight at a time; repeat clicks while it runs are dropped. On success
   * the server's reduced headline is adopted verbatim and the queue is
   * re-read so the resolved row disappears. A 409 means someone beat us
   * to it: surface a toast and leave the view alone.
   */
  async submitFeedback(tid: string): Promise<FeedbackOutcome> {
    if (this.inFlight.has(tid)) return "in_flight";
    this.inFlight.add(tid);
    try {
      const confirmed = await this.api.submitFeedback(tid);
      this.headline = confirmed.network_sa;
      if (this.selected?.tid === tid) this.selected = null;
      await this.poll();
      return "resolved";
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.toast = `${tid} was already resolved`;
        return "rejected";
      }
      this.toast = `feedback for ${tid} failed (${describe(err)})`;
      return "failed";
    } finally {
      this.inFlight.delete(tid);
    }
  }
}
