/**
 * Objective polling: a 2-second heartbeat keeping the HUD in sync.
 * Network failures flag the HUD stale and keep the last known state.
 */

import type { ApiClient, ObjectiveInfo } from "./api.js";

export const POLL_INTERVAL_MS = 2000;

type Scheduler = (fn: () => void, ms: number) => unknown;

export class ObjectivePoller {
  private stopped = false;

  constructor(
    private client: ApiClient,
    private session: string,
    private onUpdate: (info: ObjectiveInfo) => void,
    private onStale: () => void,
    private schedule: Scheduler = (fn, ms) => setTimeout(fn, ms),
    private intervalMs: number = POLL_INTERVAL_MS,
  ) {}

  /** One poll round; safe to call directly from tests. */
  async tick(): Promise<void> {
    try {
      const info = await this.client.objective(this.session);
      if (!this.stopped) this.onUpdate(info);
    } catch {
      if (!this.stopped) this.onStale();
    }
  }

  start(): void {
    const loop = async () => {
      if (this.stopped) return;
      await this.tick();
      if (!this.stopped) this.schedule(loop, this.intervalMs);
    };
    void loop();
  }

  stop(): void {
    this.stopped = true;
  }
}
