/**
 * End-to-end: the real tutoring service, the real client code, the real
 * reference solution and a graded mutant. Spawns `junction serve` from the
 * repository next door and talks to it over HTTP.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { CodePanel } from "../src/editor.js";
import { newHud, newScene, applyObjective, applyAssistance } from "../src/state.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = fileURLToPath(new URL("../..", import.meta.url));

function corpusSource(name: string): string {
  return readFileSync(join(REPO_ROOT, "src", "junction", "data", "corpus", `${name}.tl`), "utf-8");
}

let server: ChildProcess;

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 120; attempt += 1) {
    try {
      const response = await fetch(`${BASE}/content/intro_quiz`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("tutoring service never came up");
}

beforeAll(async () => {
  const logDir = mkdtempSync(join(tmpdir(), "junction-e2e-"));
  server = spawn(
    "python3",
    ["-m", "junction.cli", "serve", "--port", String(PORT), "--log-file", join(logDir, "events.jsonl")],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  await waitForServer();
});

afterAll(() => {
  server?.kill();
});

async function sessionWithCodeTaskUnlocked(client: ApiClient): Promise<string> {
  const { session } = await client.openSession();
  for (const block of ["intro_quiz", "binary_numbers", "state_machines", "design_specs"]) {
    await client.postEvent(session, "QuizSubmitted", { block, score: 0.5 });
    await client.postEvent(session, "BlockCompleted", { block });
  }
  return session;
}

describe("end-to-end against the live service", () => {
  it("walks objectives and applies a real assistance decision", async () => {
    const client = new ApiClient(BASE);
    const { session } = await client.openSession();
    const hud = newHud();
    const info = await client.objective(session);
    const blocks = [...info.unlocked, ...info.completed].map((id) => ({ id, title: id }));
    const scene = newScene(blocks);
    applyObjective(hud, scene, info);
    expect(hud.objectiveBlock).toBe("intro_quiz");
    expect(hud.waypoint).toEqual(scene.stations.get("intro_quiz")?.pos);

    const decision = await client.assist(session, "intro_quiz");
    expect(decision.mandatory_open).toBe(false);
    applyAssistance(hud, scene, decision);
    expect(hud.helpPanel.open).toBe(false); // never auto-opens, whatever came back

    await client.postEvent(session, "QuizSubmitted", { block: "intro_quiz", score: 0.8 });
    await client.postEvent(session, "BlockCompleted", { block: "intro_quiz" });
    const advanced = await client.objective(session);
    applyObjective(hud, scene, advanced);
    expect(advanced.objective?.block).toBe("binary_numbers");
    expect(advanced.benchmark).toBe(0.8);
  });

  it("grades the reference solution at 1.0 and animates the full trace", async () => {
    const client = new ApiClient(BASE);
    const session = await sessionWithCodeTaskUnlocked(client);
    const panel = new CodePanel(client, session, "code_task");
    panel.source = corpusSource("reference");
    const result = await panel.submit();
    expect(result.score).toBe(1.0);
    expect(result.diagnostics).toEqual([]);
    expect(result.violations).toEqual([]);
    expect(panel.animator).not.toBeNull();
    const frames = panel.animator!.playAll();
    expect(frames).toBe(120); // the demo scenario's full tick count
    expect(panel.animator!.highlightTick).toBeNull();
  });

  it("shows the violating tick for the both-green mutant", async () => {
    const client = new ApiClient(BASE);
    const session = await sessionWithCodeTaskUnlocked(client);
    const panel = new CodePanel(client, session, "code_task");
    panel.source = corpusSource("mutant_both_green");
    const result = await panel.submit();
    expect(result.score).toBeLessThanOrEqual(0.6);
    const safety = result.violations.find((v) => v.check === "safety" && v.tick !== null);
    expect(safety).toBeDefined();
    expect(panel.animator!.highlightTick).toBe(safety!.tick);
    const hotFrames: number[] = [];
    panel.animator!.playAll((row, hot) => {
      if (hot) hotFrames.push(row.tick);
    });
    expect(hotFrames).toEqual([safety!.tick]);
  });

  it("accepts a rotated phase order through the server", async () => {
    const client = new ApiClient(BASE);
    const { session } = await client.openSession();
    await client.postEvent(session, "QuizSubmitted", { block: "intro_quiz", score: 0.5 });
    await client.postEvent(session, "BlockCompleted", { block: "intro_quiz" });
    // The canonical cycle, rotated by two; the served tile list is shuffled,
    // so rebuild the cycle from the known phase names.
    const cycle = [
      "north_south_green",
      "north_south_yellow",
      "all_red_switch_to_east_west",
      "east_west_green",
      "east_west_yellow",
      "all_red_switch_to_north_south",
    ];
    const rotated = [...cycle.slice(2), ...cycle.slice(0, 2)];
    const result = await client.submit(session, "state_machines", { order: rotated });
    expect(result.correct).toBe(true);
    expect(result.score).toBe(1.0);

    const wrong = await client.submit(session, "state_machines", { order: [...cycle].reverse() });
    expect(wrong.correct).toBe(false);
  });

  it("syntax errors come back with line and column for the caret", async () => {
    const client = new ApiClient(BASE);
    const session = await sessionWithCodeTaskUnlocked(client);
    const panel = new CodePanel(client, session, "code_task");
    panel.source = "controller broken {\n  state }\n}";
    const result = await panel.submit();
    expect(result.score).toBe(0);
    expect(panel.caret()).toEqual({ line: 2, column: 9 });
  });
});
