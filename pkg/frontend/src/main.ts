/**
 * Entry point: wires the poll loop and click delegation to the model and
 * repaints after every state change. Query parameters:
 *
 *   ?api=http://host:port   API base URL (default: same origin)
 *   ?poll=2000              poll interval in milliseconds (default 5000)
 */

import { createApi } from "./api.js";
import { renderApp } from "./render.js";
import { TriageConsole } from "./triage.js";

const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? "";
const pollMs = Math.max(500, Number(params.get("poll")) || 5000);

const model = new TriageConsole(createApi(apiBase));
const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

function paint(): void {
  root!.innerHTML = renderApp(model.snapshot());
}

root.addEventListener("click", (event) => {
  const hit = (event.target as HTMLElement).closest<HTMLElement>(
    "[data-feedback],[data-select],[data-dismiss],[data-clear-select]",
  );
  if (!hit) return;
  if (hit.dataset.feedback !== undefined) {
    void model.submitFeedback(hit.dataset.feedback).then(paint);
    paint();
  } else if (hit.dataset.select !== undefined) {
    void model.select(hit.dataset.select).then(paint);
  } else if (hit.dataset.dismiss !== undefined) {
    model.dismissToast();
    paint();
  } else if (hit.dataset.clearSelect !== undefined) {
    model.clearSelection();
    paint();
  }
});

async function tick(): Promise<void> {
  await model.poll();
  paint();
}

paint();
void tick();
setInterval(() => {
  void tick();
}, pollMs);
