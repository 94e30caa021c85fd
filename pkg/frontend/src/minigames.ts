/**
 * Mini-game panels, headless. Both show their instructional prompt exactly
 * once per entry before play begins, time the attempt locally, and batch
 * their click counts into a single ActivityAction event per submission
 * (keyed per entry, so a retried submit can't double-count).
 */

import type { ApiClient, BlockContent, EventQueue, SubmitResult } from "./api.js";

type Clock = () => number; // milliseconds

export class BinaryMatchPanel {
  promptText = "";
  promptShowings = 0;
  binaries: string[] = [];
  options: number[] = [];
  timeLimit = 60;
  matches = new Map<string, number>();
  actionCount = 0;
  private startedAt: number | null = null;

  constructor(
    private client: ApiClient,
    private session: string,
    private block: string,
    private clock: Clock = () => Date.now(),
    private queue: EventQueue | null = null,
  ) {}

  /** Fetch content and show the instructional prompt (once per entry). */
  async enter(): Promise<string> {
    const content = await this.client.content(this.block, this.session);
    const round = (content.activity as { round?: { binaries: string[]; options: number[]; time_limit: number } }).round;
    if (round) {
      this.binaries = round.binaries;
      this.options = round.options;
      this.timeLimit = round.time_limit;
    }
    this.promptText = await this.client.howToPlay(this.block);
    this.promptShowings += 1;
    this.matches.clear();
    this.actionCount = 0;
    this.startedAt = null;
    return this.promptText;
  }

  /** Player dismisses the prompt; the timer starts here. */
  beginPlay(): void {
    if (this.startedAt === null) this.startedAt = this.clock();
  }

  place(binary: string, value: number): void {
    this.matches.set(binary, value);
    this.actionCount += 1;
  }

  elapsedSeconds(): number {
    return this.startedAt === null ? 0 : (this.clock() - this.startedAt) / 1000;
  }

  async submit(): Promise<SubmitResult> {
    await this.queue?.send(`actions-${this.block}-${this.promptShowings}`, "ActivityAction", {
      block: this.block,
      count: this.actionCount,
    });
    return this.client.submit(this.session, this.block, {
      matches: Object.fromEntries(this.matches),
      elapsed: this.elapsedSeconds(),
    });
  }
}

export class PhaseOrderPanel {
  promptText = "";
  promptShowings = 0;
  tiles: string[] = [];
  arranged: string[] = [];
  actionCount = 0;

  constructor(
    private client: ApiClient,
    private session: string,
    private block: string,
    private queue: EventQueue | null = null,
  ) {}

  async enter(): Promise<string> {
    const content: BlockContent = await this.client.content(this.block, this.session);
    this.tiles = [...((content.activity.phases as string[]) ?? [])];
    this.arranged = [];
    this.actionCount = 0;
    this.promptText = await this.client.howToPlay(this.block);
    this.promptShowings += 1;
    return this.promptText;
  }

  arrange(order: string[]): void {
    this.arranged = [...order];
    this.actionCount += 1;
  }

  async submit(): Promise<SubmitResult> {
    await this.queue?.send(`actions-${this.block}-${this.promptShowings}`, "ActivityAction", {
      block: this.block,
      count: this.actionCount,
    });
    return this.client.submit(this.session, this.block, { order: this.arranged });
  }
}
