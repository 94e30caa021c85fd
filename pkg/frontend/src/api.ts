/**
 * Typed client for the tutoring service JSON API.
 *
 * Every student action that must reach the server exactly once goes through
 * EventQueue, which keys actions client-side and never re-sends an action
 * the server already acknowledged, even across retries.
 */

export interface ObjectiveInfo {
  session: string;
  objective: { block: string; title: string } | null;
  completed: string[];
  unlocked: string[];
  benchmark: number | null;
}

export interface AssistAction {
  id: string;
  kind: string;
  payload: string | null;
}

export interface AssistanceDecision {
  block: string;
  action: AssistAction;
  delivery: "popup_dialogue" | "help_menu_notification" | "gate_change";
  mandatory_open: boolean;
}

export interface DiagnosticView {
  severity: string;
  line: number;
  column: number;
  message: string;
}

export interface ViolationView {
  check: string;
  scenario: string | null;
  tick: number | null;
  state: string | null;
  message: string;
}

export interface TraceRowView {
  tick: number;
  state: string;
  ns: string;
  ew: string;
  elapsed: number;
}

export interface SubmitResult {
  kind: string;
  score: number;
  correct: boolean | null;
  diagnostics: DiagnosticView[];
  violations: ViolationView[];
  trace: TraceRowView[];
}

export interface HelpSectionView {
  id: string;
  title: string;
  body: string;
  media: string | null;
}

export interface BlockContent {
  id: string;
  title: string;
  prerequisites: string[];
  activity: Record<string, unknown> & { kind: string };
  help_sections: HelpSectionView[];
  assistance: AssistAction[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const data = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ApiError(response.status, data.code ?? "unknown", data.message ?? response.statusText);
    }
    return data as T;
  }

  openSession(): Promise<{ session: string; curriculum: string; objective: string | null }> {
    return this.request("POST", "/sessions", {});
  }

  postEvent(
    session: string,
    type: string,
    payload: Record<string, unknown>,
    ts?: number,
  ): Promise<{ seq: number; objective: string | null }> {
    return this.request("POST", `/sessions/${session}/events`, { type, payload, ts: ts ?? null });
  }

  objective(session: string): Promise<ObjectiveInfo> {
    return this.request("GET", `/sessions/${session}/objective`);
  }

  assist(session: string, block: string): Promise<AssistanceDecision> {
    return this.request("GET", `/sessions/${session}/assist/${block}`);
  }

  submit(session: string, block: string, body: Record<string, unknown>): Promise<SubmitResult> {
    return this.request("POST", `/sessions/${session}/submit/${block}`, body);
  }

  content(block: string, session?: string): Promise<BlockContent> {
    const query = session ? `?session=${encodeURIComponent(session)}` : "";
    return this.request("GET", `/content/${block}${query}`);
  }

  async howToPlay(block: string): Promise<string> {
    const data = await this.request<{ text: string }>("GET", `/content/${block}/howtoplay`);
    return data.text;
  }
}

/**
 * At-most-once event delivery per logical action. An action is identified
 * by a caller-chosen key; retries after network failures re-send the same
 * action, and acknowledged keys are never sent again.
 */
export class EventQueue {
  private acked = new Map<string, number>();
  private pending = new Map<string, { type: string; payload: Record<string, unknown> }>();

  constructor(
    private client: ApiClient,
    private session: string,
  ) {}

  async send(key: string, type: string, payload: Record<string, unknown>): Promise<number | null> {
    const done = this.acked.get(key);
    if (done !== undefined) return done;
    this.pending.set(key, { type, payload });
    return this.flushKey(key);
  }

  private async flushKey(key: string): Promise<number | null> {
    const action = this.pending.get(key);
    if (!action) return this.acked.get(key) ?? null;
    try {
      const { seq } = await this.client.postEvent(this.session, action.type, action.payload);
      this.acked.set(key, seq);
      this.pending.delete(key);
      return seq;
    } catch (error) {
      if (error instanceof ApiError) {
        // The server saw and rejected it; retrying identical input is useless.
        this.pending.delete(key);
        throw error;
      }
      return null; // network trouble: stays pending for retry
    }
  }

  /** Retry everything still pending; returns how many actions got through. */
  async retryPending(): Promise<number> {
    let delivered = 0;
    for (const key of [...this.pending.keys()]) {
      if ((await this.flushKey(key)) !== null) delivered += 1;
    }
    return delivered;
  }

  pendingCount(): number {
    return this.pending.size;
  }

  ackedSeq(key: string): number | undefined {
    return this.acked.get(key);
  }
}
