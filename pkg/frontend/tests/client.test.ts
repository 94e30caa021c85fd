import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, EventQueue } from "../src/api.js";
import { TraceAnimator, CodePanel } from "../src/editor.js";
import { MoodWidget } from "../src/emotion.js";
import { BinaryMatchPanel, PhaseOrderPanel } from "../src/minigames.js";
import { ObjectivePoller } from "../src/poll.js";
import { FakeServer } from "./fake_server.js";

function makeClient(server: FakeServer): ApiClient {
  return new ApiClient("", server.fetch);
}

describe("event queue idempotency", () => {
  it("delivers a retried action exactly once", async () => {
    const server = new FakeServer();
    const queue = new EventQueue(makeClient(server), "s1");

    server.failNextRequests = 1;
    expect(await queue.send("k1", "HelpOpened", {})).toBeNull();
    expect(queue.pendingCount()).toBe(1);
    expect(server.eventPosts().length).toBe(0);

    expect(await queue.retryPending()).toBe(1);
    expect(server.eventPosts().length).toBe(1);
    const seq = queue.ackedSeq("k1");
    expect(seq).toBe(1);

    // Same logical action again: no second event.
    expect(await queue.send("k1", "HelpOpened", {})).toBe(seq);
    expect(server.eventPosts().length).toBe(1);
  });

  it("drops actions the server rejected instead of retrying them forever", async () => {
    const server = new FakeServer();
    server.handle((method, path) =>
      path.endsWith("/events") ? { status: 400, json: { code: "InvalidPayload", message: "bad", detail: null } } : null,
    );
    const queue = new EventQueue(makeClient(server), "s1");
    await expect(queue.send("k1", "QuizSubmitted", { block: "x", score: 9 })).rejects.toThrow(ApiError);
    expect(queue.pendingCount()).toBe(0);
  });
});

describe("objective poller", () => {
  it("flags the HUD stale on failure and recovers on the next success", async () => {
    const server = new FakeServer();
    const updates: string[] = [];
    let stale = 0;
    const poller = new ObjectivePoller(
      makeClient(server),
      "s1",
      (info) => updates.push(info.objective?.block ?? "-"),
      () => {
        stale += 1;
      },
      () => undefined,
      0,
    );
    server.failNextRequests = 1;
    await poller.tick();
    expect(stale).toBe(1);
    expect(updates).toEqual([]);
    await poller.tick();
    expect(updates).toEqual(["intro_quiz"]);
  });
});

describe("trace animation", () => {
  const trace = [
    { tick: 0, state: "a", ns: "GREEN", ew: "RED", elapsed: 1 },
    { tick: 1, state: "a", ns: "GREEN", ew: "RED", elapsed: 2 },
    { tick: 2, state: "b", ns: "GREEN", ew: "GREEN", elapsed: 0 },
    { tick: 3, state: "b", ns: "GREEN", ew: "GREEN", elapsed: 1 },
  ];

  it("plays every frame and highlights the violating tick", () => {
    const animator = new TraceAnimator(trace, [
      { check: "safety", scenario: "no_traffic", tick: 2, state: "b", message: "conflict" },
    ]);
    const highlighted: number[] = [];
    const frames = animator.playAll((row, isHot) => {
      if (isHot) highlighted.push(row.tick);
    });
    expect(frames).toBe(4);
    expect(animator.highlightTick).toBe(2);
    expect(highlighted).toEqual([2]);
  });

  it("has no highlight when grading passed", () => {
    const animator = new TraceAnimator(trace, []);
    expect(animator.highlightTick).toBeNull();
  });
});

describe("code panel", () => {
  it("surfaces diagnostics with a caret at the first error", async () => {
    const server = new FakeServer();
    server.submitResult = {
      kind: "code_task",
      score: 0,
      correct: null,
      diagnostics: [{ severity: "error", line: 3, column: 9, message: "expected ';'" }],
      violations: [],
      trace: [],
    };
    const panel = new CodePanel(makeClient(server), "s1", "code_task");
    panel.source = "controller bad {";
    const result = await panel.submit();
    expect(result.score).toBe(0);
    expect(panel.caret()).toEqual({ line: 3, column: 9 });
    expect(panel.animator).toBeNull();
  });
});

describe("mini-game panels", () => {
  it("shows the instructional prompt exactly once per entry", async () => {
    const server = new FakeServer();
    const panel = new BinaryMatchPanel(makeClient(server), "s1", "binary_numbers");
    await panel.enter();
    expect(panel.promptShowings).toBe(1);
    panel.beginPlay();
    panel.beginPlay(); // idempotent; does not re-show anything
    expect(panel.promptShowings).toBe(1);
    await panel.enter(); // a fresh entry shows it again
    expect(panel.promptShowings).toBe(2);
  });

  it("measures elapsed locally, batches actions, and submits the matches", async () => {
    const server = new FakeServer();
    let now = 10_000;
    const client = makeClient(server);
    const queue = new EventQueue(client, "s1");
    const panel = new BinaryMatchPanel(client, "s1", "binary_numbers", () => now, queue);
    await panel.enter();
    panel.beginPlay();
    now += 12_500;
    panel.place("0101", 5);
    panel.place("0101", 9);
    panel.place("0101", 5);
    await panel.submit();
    const submit = server.posts.find((p) => p.path.includes("/submit/"));
    expect(submit?.body).toEqual({ matches: { "0101": 5 }, elapsed: 12.5 });
    const batched = server.eventPosts();
    expect(batched.length).toBe(1);
    expect((batched[0]?.body as { type: string; payload: unknown }).type).toBe("ActivityAction");
    expect((batched[0]?.body as { payload: { count: number } }).payload.count).toBe(3);
  });

  it("phase panel submits the arranged order", async () => {
    const server = new FakeServer();
    server.handle((method, path) => {
      if (path.includes("/content/") && !path.includes("howtoplay")) {
        return {
          status: 200,
          json: {
            id: "state_machines",
            title: "Phases",
            prerequisites: [],
            activity: { kind: "phase_order", phases: ["a", "b", "c"] },
            help_sections: [],
            assistance: [],
          },
        };
      }
      return null;
    });
    const panel = new PhaseOrderPanel(makeClient(server), "s1", "state_machines");
    await panel.enter();
    expect(panel.tiles).toEqual(["a", "b", "c"]);
    panel.arrange(["b", "c", "a"]);
    await panel.submit();
    const post = server.posts.find((p) => p.path.includes("/submit/"));
    expect(post?.body).toEqual({ order: ["b", "c", "a"] });
  });
});

describe("mood widget", () => {
  it("logs one sample per prompt with unique idempotency keys", async () => {
    const server = new FakeServer();
    const queue = new EventQueue(makeClient(server), "s1");
    const widget = new MoodWidget(queue);

    expect(await widget.choose("bored")).toBeNull(); // nothing prompted yet
    widget.prompt();
    expect(widget.visible).toBe(true);
    const first = await widget.choose("frustrated");
    expect(first).toBe(1);
    expect(await widget.choose("frustrated")).toBeNull(); // widget closed again

    widget.prompt();
    const second = await widget.choose("engaged");
    expect(second).toBe(2);
    expect(server.eventPosts().length).toBe(2);
  });
});
