/**
 * Lightweight mood check: a periodic one-click widget standing in for any
 * fancier affect sensing. Each prompt is its own idempotency key, so a
 * retried submission can never double-log a sample.
 */

import type { EventQueue } from "./api.js";

export const MOODS = ["engaged", "neutral", "frustrated", "bored"] as const;
export type Mood = (typeof MOODS)[number];

export class MoodWidget {
  visible = false;
  private promptCounter = 0;

  constructor(private queue: EventQueue) {}

  /** Called by the scheduler every few minutes. */
  prompt(): void {
    if (!this.visible) {
      this.visible = true;
      this.promptCounter += 1;
    }
  }

  async choose(mood: Mood): Promise<number | null> {
    if (!this.visible) return null;
    this.visible = false;
    return this.queue.send(`mood-${this.promptCounter}`, "EmotionSample", { label: mood });
  }

  dismiss(): void {
    this.visible = false;
  }
}
