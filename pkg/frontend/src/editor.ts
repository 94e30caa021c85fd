/**
 * Code panel: edit controller source, submit, show diagnostics at their
 * line/column, and play the returned simulation trace tick by tick. A
 * grading violation with a tick highlights that frame during playback.
 */

import type { ApiClient, DiagnosticView, SubmitResult, TraceRowView, ViolationView } from "./api.js";

export class TraceAnimator {
  index = 0;
  readonly highlightTick: number | null;

  constructor(
    readonly frames: TraceRowView[],
    violations: ViolationView[] = [],
  ) {
    const flagged = violations.find((v) => v.tick !== null);
    this.highlightTick = flagged ? flagged.tick : null;
  }

  frame(): TraceRowView | null {
    return this.frames[this.index] ?? null;
  }

  step(): TraceRowView | null {
    if (this.index < this.frames.length - 1) {
      this.index += 1;
      return this.frame();
    }
    return null;
  }

  isHighlighted(): boolean {
    const current = this.frame();
    return current !== null && this.highlightTick !== null && current.tick === this.highlightTick;
  }

  /** Run to the end; returns how many frames were shown. */
  playAll(onFrame?: (row: TraceRowView, highlighted: boolean) => void): number {
    if (this.frames.length === 0) return 0;
    this.index = 0;
    let shown = 0;
    for (;;) {
      const current = this.frame();
      if (current === null) break;
      shown += 1;
      onFrame?.(current, this.isHighlighted());
      if (this.step() === null) break;
    }
    return shown;
  }
}

export class CodePanel {
  source = "";
  diagnostics: DiagnosticView[] = [];
  violations: ViolationView[] = [];
  grade: number | null = null;
  animator: TraceAnimator | null = null;

  constructor(
    private client: ApiClient,
    private session: string,
    private block: string,
  ) {}

  loadStarter(starter: string): void {
    if (!this.source) this.source = starter;
  }

  /** Diagnostic marker for the first error, as (line, column), if any. */
  caret(): { line: number; column: number } | null {
    const first = this.diagnostics.find((d) => d.severity === "error");
    return first ? { line: first.line, column: first.column } : null;
  }

  async submit(): Promise<SubmitResult> {
    const result = await this.client.submit(this.session, this.block, { source: this.source });
    this.diagnostics = result.diagnostics;
    this.violations = result.violations;
    this.grade = result.score;
    this.animator = result.trace.length ? new TraceAnimator(result.trace, result.violations) : null;
    return result;
  }
}
