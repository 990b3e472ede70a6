/**
 * Wire shapes for the scoring API. Field names match the server payloads
 * exactly; the console never invents or recomputes a number, it only
 * carries these through to the screen.
 */

export interface SaComponents {
  definite: number;
  procedural: number;
  network: number;
  infrastructural: number;
}

export type ThreatKind = "vulnerability" | "attack" | "incident";

export interface ThreatRow {
  tid: string;
  type: ThreatKind;
  name: string;
  sid: string;
  status: "active" | "resolved";
  priority: number;
  sa: SaComponents;
  received_at: number;
}

export interface ThreatList {
  threats: ThreatRow[];
}

/** Damage subgraph: which services a threat has provably hit, and how hard. */
export interface DefiniteArc {
  src: string;
  dst: string;
  contribution: number;
}

export interface DefiniteGraph {
  nodes: string[];
  arcs: DefiniteArc[];
}

/** Projected spread from the origin organization to its peers. */
export interface SpreadTarget {
  oid: string;
  probability: number;
  contribution: number;
}

export interface SpreadGraph {
  origin: string;
  targets: SpreadTarget[];
}

export interface ThreatGraphs {
  definite: DefiniteGraph;
  procedural: SpreadGraph;
  network: SpreadGraph;
  infrastructural: SpreadGraph;
}

export interface ThreatDetail extends ThreatRow {
  graphs: ThreatGraphs;
}

export interface HistoryPoint {
  timestamp: number;
  event: string;
  sa: SaComponents;
}

export interface NetworkSaResponse {
  sa: SaComponents;
  history: HistoryPoint[];
}

export interface FeedbackResponse {
  tid: string;
  network_sa: SaComponents;
}

export interface ApiErrorBody {
  error: {
    code: string;
    message: string;
  };
}

export const SA_LABELS: ReadonlyArray<[keyof SaComponents, string]> = [
  ["definite", "Definite"],
  ["procedural", "Procedural"],
  ["network", "Network"],
  ["infrastructural", "Infrastructural"],
];
