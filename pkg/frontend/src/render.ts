/**
 * HTML builders. Pure string in, string out, so the whole surface can be
 * asserted in tests without a DOM. main.ts owns the single innerHTML
 * sink and the event wiring.
 */

import {
  SA_LABELS,
  type DefiniteGraph,
  type HistoryPoint,
  type SaComponents,
  type SpreadGraph,
} from "./types.js";
import type { TriageSnapshot } from "./triage.js";

export function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** Compact display form; the full value always rides along in a title attribute. */
export function fmt(value: number): string {
  if (!Number.isFinite(value)) return String(value);
  return String(Number(value.toFixed(4)));
}

function statusChip(snap: TriageSnapshot): string {
  if (snap.online) return `<span class="dot live"></span>live`;
  if (!snap.everPolled && snap.missedPolls === 0) return `<span class="dot"></span>connecting`;
  return `<span class="dot dead"></span>offline`;
}

export function renderBanner(snap: TriageSnapshot): string {
  if (snap.missedPolls === 0) return "";
  const misses = snap.missedPolls === 1 ? "1 missed poll" : `${snap.missedPolls} missed polls`;
  const base = `API unreachable (${misses}), showing the last received data.`;
  if (!snap.stale) return `<div class="banner">${base}</div>`;
  return `<div class="banner stale">${base} Treat it as stale.</div>`;
}

export function sparkline(history: readonly HistoryPoint[]): string {
  if (history.length < 2) return `<svg class="spark" viewBox="0 0 120 28"></svg>`;
  const totals = history.map(
    (h) => h.sa.definite + h.sa.procedural + h.sa.network + h.sa.infrastructural,
  );
  const top = Math.max(...totals, 1e-9);
  const step = 116 / (totals.length - 1);
  const points = totals
    .map((t, i) => `${(2 + i * step).toFixed(1)},${(26 - (t / top) * 24).toFixed(1)}`)
    .join(" ");
  return `<svg class="spark" viewBox="0 0 120 28" preserveAspectRatio="none"><polyline points="${points}" /></svg>`;
}

export function renderHeadline(snap: TriageSnapshot): string {
  const cells = SA_LABELS.map(([key, label]) => {
    const value = snap.headline ? fmt(snap.headline[key]) : "&middot;";
    const full = snap.headline ? String(snap.headline[key]) : "";
    return `<div class="sa-cell"><span class="sa-label">${label}</span><span class="sa-value" title="${full}">${value}</span></div>`;
  });
  return `<section class="headline">
    <div class="sa-grid">${cells.join("")}</div>
    ${sparkline(snap.history)}
  </section>`;
}

export function renderQueue(snap: TriageSnapshot): string {
  if (snap.rows.length === 0) {
    const note = snap.everPolled ? "No active threats." : "Waiting for the first poll.";
    return `<section class="queue"><h2>Active threats</h2><p class="empty">${note}</p></section>`;
  }
  const rows = snap.rows.map((row, i) => {
    const busy = snap.inFlight.has(row.tid);
    const selected = snap.selected?.tid === row.tid ? " selected" : "";
    const comps = SA_LABELS.map(
      ([key]) => `<td class="num" title="${row.sa[key]}">${fmt(row.sa[key])}</td>`,
    ).join("");
    return `<tr class="row${selected}" data-select="${esc(row.tid)}">
      <td class="rank">${i + 1}</td>
      <td class="tid">${esc(row.tid)}</td>
      <td><span class="kind ${row.type}">${row.type}</span></td>
      <td class="name" title="on ${esc(row.sid)}">${esc(row.name)}</td>
      ${comps}
      <td class="num priority" title="${row.priority}">${fmt(row.priority)}</td>
      <td><button class="resolve" data-feedback="${esc(row.tid)}"${busy ? " disabled" : ""}>${busy ? "sending" : "resolve"}</button></td>
    </tr>`;
  });
  return `<section class="queue">
    <h2>Active threats <span class="count">${snap.rows.length}</span></h2>
    <div class="scroll">
    <table>
      <thead><tr><th></th><th>tid</th><th>type</th><th>name</th><th>D</th><th>P</th><th>N</th><th>I</th><th>priority</th><th></th></tr></thead>
      <tbody>${rows.join("")}</tbody>
    </table>
    </div>
  </section>`;
}

function vectorBars(sa: SaComponents): string {
  const peak = Math.max(sa.definite, sa.procedural, sa.network, sa.infrastructural, 1e-9);
  const bars = SA_LABELS.map(([key, label]) => {
    const value = sa[key];
    const width = ((value / peak) * 100).toFixed(1);
    return `<div class="bar-row">
      <span class="bar-label">${label}</span>
      <div class="bar-track"><div class="bar-fill" style="width:${width}%"></div></div>
      <span class="bar-value" title="${value}">${fmt(value)}</span>
    </div>`;
  });
  return `<div class="bars">${bars.join("")}</div>`;
}

export function definiteGraphSvg(graph: DefiniteGraph, origin: string): string {
  const nodes = graph.nodes;
  if (nodes.length === 0) return `<p class="empty">No definite damage recorded.</p>`;
  const w = 340;
  const h = 220;
  const cx = w / 2;
  const cy = h / 2;
  const radius = nodes.length === 1 ? 0 : Math.min(cx, cy) - 34;
  const place = new Map<string, [number, number]>();
  nodes.forEach((sid, i) => {
    const angle = (2 * Math.PI * i) / nodes.length - Math.PI / 2;
    place.set(sid, [cx + radius * Math.cos(angle), cy + radius * Math.sin(angle)]);
  });
  const peak = Math.max(...graph.arcs.map((a) => a.contribution), 1e-9);
  const lines = graph.arcs.map((arc) => {
    const [x1, y1] = place.get(arc.src) ?? [cx, cy];
    const [x2, y2] = place.get(arc.dst) ?? [cx, cy];
    const width = 0.8 + 2.4 * (arc.contribution / peak);
    return (
      `<line x1="${x1.toFixed(1)}" y1="${y1.toFixed(1)}" x2="${x2.toFixed(1)}" y2="${y2.toFixed(1)}"` +
      ` stroke-width="${width.toFixed(2)}" marker-end="url(#arrow)">` +
      `<title>${esc(arc.src)} to ${esc(arc.dst)}: ${fmt(arc.contribution)}</title></line>`
    );
  });
  const chips = nodes.map((sid) => {
    const [x, y] = place.get(sid)!;
    const cls = sid === origin ? "node origin" : "node";
    return (
      `<g class="${cls}"><circle cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="15"/>` +
      `<text x="${x.toFixed(1)}" y="${(y + 3).toFixed(1)}">${esc(sid)}</text></g>`
    );
  });
  return `<svg class="graph" viewBox="0 0 ${w} ${h}">
    <defs><marker id="arrow" markerUnits="userSpaceOnUse" markerWidth="8" markerHeight="8" refX="19" refY="4" orient="auto-start-reverse"><path d="M0,0 L8,4 L0,8 z"/></marker></defs>
    ${lines.join("")}
    ${chips.join("")}
  </svg>`;
}

export function spreadSection(title: string, graph: SpreadGraph): string {
  if (graph.targets.length === 0) return `<h3>${title}</h3><p class="empty">none</p>`;
  const rows = graph.targets
    .map(
      (t) =>
        `<tr><td class="tid">${esc(t.oid)}</td>` +
        `<td class="num" title="${t.probability}">${fmt(t.probability)}</td>` +
        `<td class="num" title="${t.contribution}">${fmt(t.contribution)}</td></tr>`,
    )
    .join("");
  return `<h3>${title}</h3>
  <table class="spread">
    <thead><tr><th>from ${esc(graph.origin)} to</th><th>probability</th><th>adds</th></tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

export function renderDetail(snap: TriageSnapshot): string {
  const st = snap.selected;
  if (!st) {
    return `<section class="detail"><p class="empty">Select a row to inspect its breakdown.</p></section>`;
  }
  return `<section class="detail">
    <header>
      <h2>${esc(st.tid)} <span class="kind ${st.type}">${st.type}</span></h2>
      <button class="close" data-clear-select>close</button>
    </header>
    <p class="meta">${esc(st.name)} on ${esc(st.sid)} &middot; priority <b title="${st.priority}">${fmt(st.priority)}</b></p>
    ${vectorBars(st.sa)}
    <h3>Definite footprint</h3>
    ${definiteGraphSvg(st.graphs.definite, st.sid)}
    ${spreadSection("Procedural spread", st.graphs.procedural)}
    ${spreadSection("Network spread", st.graphs.network)}
    ${spreadSection("Infrastructural recurrence", st.graphs.infrastructural)}
  </section>`;
}

export function renderToast(snap: TriageSnapshot): string {
  if (!snap.toast) return "";
  return `<div class="toast" role="status">${esc(snap.toast)} <button data-dismiss>dismiss</button></div>`;
}

export function renderApp(snap: TriageSnapshot): string {
  return `<header class="top">
    <h1>qrsacp console</h1>
    <div class="status">${statusChip(snap)}</div>
  </header>
  ${renderBanner(snap)}
  ${renderHeadline(snap)}
  <main class="split">
    ${renderQueue(snap)}
    ${renderDetail(snap)}
  </main>
  ${renderToast(snap)}`;
}
