// DOM wiring for the labeling console. Configuration comes from the URL:
//   index.html?server=http://127.0.0.1:8765&session=<id>
// Omit `session` to create a fresh one on the server's base config.

import { ApiClient } from "./api.js";
import type { PendingItem, Verdict } from "./api.js";
import { drawCurve } from "./curve.js";
import { verdictForKey } from "./keyboard.js";
import { Poller } from "./poller.js";
import {
  SessionView,
  applyPending,
  applyState,
  beginLabel,
  connectionLost,
  newView,
  rollbackLabel,
  settleLabel,
} from "./state.js";

const $ = (id: string) => document.getElementById(id)!;

function render(view: SessionView): void {
  $("phase").textContent = view.phase;
  $("counts").textContent =
    `${view.labeledCount} labeled · ${view.skippedCount} skipped · ` +
    `${view.budgetRemaining} of ${view.budget} budget left`;
  const banner = $("banner");
  banner.textContent = view.banner ?? "";
  banner.style.display = view.banner ? "block" : "none";

  const grid = $("grid");
  grid.innerHTML = "";
  if (view.phase === "training-gan") {
    grid.innerHTML = "<p class='notice'>training the generator…</p>";
  } else if (view.phase === "retraining") {
    grid.innerHTML = "<p class='notice'>retraining…</p>";
  } else if (view.phase === "done") {
    grid.innerHTML = "<p class='notice'>session complete</p>";
  }
  for (const item of view.items) {
    const cell = document.createElement("figure");
    cell.className = "cell" + (item.query_id === view.focusId ? " focused" : "");
    const img = document.createElement("img");
    // rendered exactly as delivered: decoding the PNG is the only transform
    img.src = `data:image/png;base64,${item.image}`;
    img.alt = item.query_id;
    const cap = document.createElement("figcaption");
    cap.textContent = item.query_id;
    cell.append(img, cap);
    cell.addEventListener("click", () => {
      view.focusId = item.query_id;
      render(view);
    });
    grid.appendChild(cell);
  }
  drawCurve($("curve") as HTMLCanvasElement, view.curve);
}

async function submit(api: ApiClient, view: SessionView, verdict: Verdict): Promise<void> {
  const item = beginLabel(view);
  if (!item) return;
  render(view);
  try {
    const ack = await api.postLabels(view.sessionId, [
      { query_id: item.query_id, verdict },
    ]);
    if (ack.rejected.includes(item.query_id)) {
      rollbackLabel(view, item, `verdict for ${item.query_id} rejected`);
    } else {
      settleLabel(view, item.query_id);
    }
  } catch (err) {
    rollbackLabel(view, item, err instanceof Error ? err.message : String(err));
  }
  render(view);
}

async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const server = params.get("server") ?? "http://127.0.0.1:8765";
  const api = new ApiClient(server);
  let sessionId = params.get("session");
  if (!sessionId) {
    const created = await api.createSession();
    sessionId = created.session_id;
    params.set("session", sessionId);
    history.replaceState(null, "", `?${params}`);
  }
  $("session").textContent = sessionId;

  const view = newView(sessionId);
  render(view);

  const poller = new Poller(api, sessionId, {
    onState: (state, seq) => {
      if (applyState(view, state, seq)) render(view);
    },
    onPending: (items: PendingItem[], seq) => {
      if (applyPending(view, items, seq)) render(view);
    },
    onError: (message) => {
      connectionLost(view, `server unreachable: ${message} (retrying)`);
      render(view);
    },
  });
  poller.start();

  document.addEventListener("keydown", (event) => {
    const verdict = verdictForKey(event.key);
    if (verdict === null || view.phase !== "awaiting-labels") return;
    event.preventDefault();
    void submit(api, view, verdict);
  });
}

void start().catch((err) => {
  const banner = $("banner");
  banner.textContent = String(err);
  banner.style.display = "block";
});
