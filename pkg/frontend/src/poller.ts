// Fixed-interval polling with exponential backoff on failure. Responses
// carry a send-sequence number so the view layer can drop stale replies.

import { ApiClient } from "./api.js";
import type { PendingItem, SessionState } from "./api.js";

export interface PollCallbacks {
  onState: (state: SessionState, seq: number) => void;
  onPending: (items: PendingItem[], seq: number) => void;
  onError: (message: string) => void;
}

export const POLL_INTERVAL_MS = 1000;
const BACKOFF_MAX_MS = 15000;

export class Poller {
  private seq = 0;
  private delay = POLL_INTERVAL_MS;
  private stopped = false;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private api: ApiClient,
    private sessionId: string,
    private callbacks: PollCallbacks,
  ) {}

  start(): void {
    this.stopped = false;
    void this.tick();
  }

  stop(): void {
    this.stopped = true;
    if (this.timer) clearTimeout(this.timer);
  }

  private schedule(): void {
    if (this.stopped) return;
    this.timer = setTimeout(() => void this.tick(), this.delay);
  }

  private async tick(): Promise<void> {
    const seq = ++this.seq;
    try {
      const state = await this.api.getState(this.sessionId);
      this.callbacks.onState(state, seq);
      if (state.phase === "awaiting-labels") {
        const pending = await this.api.getPending(this.sessionId);
        this.callbacks.onPending(pending.items, seq);
      }
      this.delay = POLL_INTERVAL_MS;
    } catch (err) {
      this.callbacks.onError(err instanceof Error ? err.message : String(err));
      this.delay = Math.min(this.delay * 2, BACKOFF_MAX_MS);
    }
    this.schedule();
  }
}
