// Typed client for the labeling-session HTTP contract.

export type Verdict = 1 | -1 | "skip";

export interface PendingItem {
  query_id: string;
  image: string; // base64 PNG
  iteration: number;
}

export interface SessionState {
  phase: string;
  labeled_count: number;
  skipped_count: number;
  budget: number;
  budget_remaining: number;
  curve: [number, number][];
  error?: string;
}

export interface LabelAck {
  applied: string[];
  rejected: string[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly field?: string,
  ) {
    super(message);
  }
}

async function parseJson(resp: Response): Promise<any> {
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    throw new ApiError(resp.status, body.error ?? `HTTP ${resp.status}`, body.field);
  }
  return body;
}

export class ApiClient {
  constructor(readonly server: string) {}

  private url(path: string): string {
    return this.server.replace(/\/$/, "") + path;
  }

  async createSession(overrides: Record<string, string | number> = {}): Promise<{
    session_id: string;
    phase: string;
  }> {
    const resp = await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ config: overrides }),
    });
    return parseJson(resp);
  }

  async getState(sessionId: string): Promise<SessionState> {
    return parseJson(await fetch(this.url(`/sessions/${sessionId}/state`)));
  }

  async getPending(sessionId: string): Promise<{ phase: string; items: PendingItem[] }> {
    return parseJson(await fetch(this.url(`/sessions/${sessionId}/pending`)));
  }

  async postLabels(
    sessionId: string,
    responses: { query_id: string; verdict: Verdict }[],
  ): Promise<LabelAck> {
    const resp = await fetch(this.url(`/sessions/${sessionId}/labels`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ responses }),
    });
    return parseJson(resp);
  }
}
