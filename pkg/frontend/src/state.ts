// Client-side session view: a pure mirror of server state plus transient
// UI concerns (focus, in-flight posts, stale-response filtering). The view
// never invents state -- every field traces back to a server payload or an
// explicit user action, and server responses always win on conflict.

import type { PendingItem, SessionState } from "./api.js";

export interface SessionView {
  sessionId: string;
  phase: string;
  items: PendingItem[];
  focusId: string | null;
  labeledCount: number;
  skippedCount: number;
  budgetRemaining: number;
  budget: number;
  curve: [number, number][];
  banner: string | null;
  inFlight: string[]; // optimistically removed, awaiting the server ack
  lastStateSeq: number;
  lastPendingSeq: number;
}

export function newView(sessionId: string): SessionView {
  return {
    sessionId,
    phase: "connecting",
    items: [],
    focusId: null,
    labeledCount: 0,
    skippedCount: 0,
    budgetRemaining: 0,
    budget: 0,
    curve: [],
    banner: null,
    inFlight: [],
    lastStateSeq: -1,
    lastPendingSeq: -1,
  };
}

// Responses are stamped with a send sequence; anything older than the
// newest applied response is dropped so a slow reply cannot roll the view
// backwards.
export function applyState(view: SessionView, state: SessionState, seq: number): boolean {
  if (seq <= view.lastStateSeq) return false;
  view.lastStateSeq = seq;
  view.phase = state.phase;
  view.labeledCount = state.labeled_count;
  view.skippedCount = state.skipped_count;
  view.budgetRemaining = state.budget_remaining;
  view.budget = state.budget;
  view.curve = state.curve;
  view.banner = null;
  return true;
}

export function applyPending(view: SessionView, items: PendingItem[], seq: number): boolean {
  if (seq <= view.lastPendingSeq) return false;
  view.lastPendingSeq = seq;
  const fresh = items.filter((item) => !view.inFlight.includes(item.query_id));
  view.items = fresh;
  if (!view.focusId || !fresh.some((item) => item.query_id === view.focusId)) {
    view.focusId = fresh.length ? fresh[0].query_id : null;
  }
  return true;
}

export function focusedItem(view: SessionView): PendingItem | null {
  return view.items.find((item) => item.query_id === view.focusId) ?? null;
}

// Optimistic advance: drop the focused item locally and remember the post
// so a poll arriving before the ack cannot resurrect it.
export function beginLabel(view: SessionView): PendingItem | null {
  const item = focusedItem(view);
  if (!item) return null;
  view.inFlight.push(item.query_id);
  view.items = view.items.filter((it) => it.query_id !== item.query_id);
  view.focusId = view.items.length ? view.items[0].query_id : null;
  return item;
}

export function settleLabel(view: SessionView, queryId: string): void {
  view.inFlight = view.inFlight.filter((id) => id !== queryId);
}

// Server rejected the verdict: put the item back and restore focus to it.
export function rollbackLabel(view: SessionView, item: PendingItem, notice: string): void {
  view.inFlight = view.inFlight.filter((id) => id !== item.query_id);
  if (!view.items.some((it) => it.query_id === item.query_id)) {
    view.items = [item, ...view.items];
  }
  view.focusId = item.query_id;
  view.banner = notice;
}

export function connectionLost(view: SessionView, message: string): void {
  view.banner = message;
}
