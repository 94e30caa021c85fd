/**
 * Browser bootstrap: wires the headless game state to the DOM.
 *
 * The page is served by the tutoring service under /app, so the API lives
 * on the same origin one level up.
 */

import { ApiClient, EventQueue, type BlockContent } from "./api.js";
import { CodePanel } from "./editor.js";
import { MOODS, MoodWidget } from "./emotion.js";
import { BinaryMatchPanel, PhaseOrderPanel } from "./minigames.js";
import { ObjectivePoller } from "./poll.js";
import {
  applyAssistance,
  applyObjective,
  dismissDialogue,
  interact,
  markStale,
  newHud,
  newScene,
  userOpensHelp,
  closeHelp,
  type HudState,
  type MapScene,
} from "./state.js";

const TILE = 28;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function drawScene(canvas: HTMLCanvasElement, scene: MapScene, hud: HudState): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#24313f";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  for (const station of scene.stations.values()) {
    ctx.fillStyle = station.locked ? "#4b5563" : "#3b82f6";
    ctx.fillRect(station.pos.x * TILE, station.pos.y * TILE, TILE * 2, TILE * 2);
    ctx.fillStyle = "#e5e7eb";
    ctx.font = "11px sans-serif";
    ctx.fillText(station.title.slice(0, 18), station.pos.x * TILE, station.pos.y * TILE - 4);
  }
  if (hud.waypoint) {
    ctx.strokeStyle = "#fbbf24";
    ctx.lineWidth = 3;
    ctx.beginPath();
    ctx.arc(hud.waypoint.x * TILE + TILE, hud.waypoint.y * TILE + TILE, TILE * 1.4, 0, Math.PI * 2);
    ctx.stroke();
  }
  ctx.fillStyle = "#f87171";
  ctx.fillRect(scene.player.x * TILE, scene.player.y * TILE, TILE * 0.8, TILE * 0.8);
}

function renderHud(hud: HudState): void {
  el("objective-text").textContent = hud.objectiveText + (hud.stale ? " (offline, showing last known)" : "");
  el("help-badge").style.display = hud.badges.has("help") ? "inline-block" : "none";
  const dialogue = el("dialogue");
  dialogue.style.display = hud.dialogue ? "block" : "none";
  el("dialogue-text").textContent = hud.dialogue?.text ?? "";
  el("grade").textContent = hud.lastGrade === null ? "" : `last grade: ${hud.lastGrade.toFixed(2)}`;
}

async function renderHelp(hud: HudState, client: ApiClient, block: string | null): Promise<void> {
  const panel = el("help-panel");
  panel.style.display = hud.helpPanel.open ? "block" : "none";
  if (!hud.helpPanel.open || !block) return;
  const content: BlockContent = await client.content(block);
  const body = el("help-body");
  body.innerHTML = "";
  for (const section of content.help_sections) {
    const heading = document.createElement("h4");
    heading.textContent = section.title;
    const text = document.createElement("p");
    text.textContent = section.body;
    if (section.id === hud.helpPanel.section) heading.style.color = "#fbbf24";
    body.append(heading, text);
  }
}

async function boot(): Promise<void> {
  const client = new ApiClient("..");
  const hud = newHud();
  const opened = await client.openSession();
  const session = opened.session;
  const queue = new EventQueue(client, session);
  const mood = new MoodWidget(queue);

  const info = await client.objective(session);
  const blockMeta: { id: string; title: string }[] = [];
  for (const blockId of [...info.unlocked, ...info.completed]) {
    const content = await client.content(blockId);
    blockMeta.push({ id: content.id, title: content.title });
  }
  // Stations for not-yet-visible blocks appear as they unlock.
  const scene = newScene(blockMeta);
  const canvas = el<HTMLCanvasElement>("map");

  const refresh = () => {
    drawScene(canvas, scene, hud);
    renderHud(hud);
  };

  const poller = new ObjectivePoller(
    client,
    session,
    async (latest) => {
      for (const blockId of [...latest.unlocked, ...latest.completed]) {
        if (!scene.stations.has(blockId)) {
          const content = await client.content(blockId);
          const all = [...scene.stations.values()].map((s) => ({ id: s.block, title: s.title }));
          all.push({ id: content.id, title: content.title });
          const rebuilt = newScene(all);
          scene.stations = rebuilt.stations;
        }
      }
      applyObjective(hud, scene, latest);
      refresh();
    },
    () => {
      markStale(hud);
      renderHud(hud);
    },
  );
  poller.start();

  el("help-button").addEventListener("click", () => {
    userOpensHelp(hud);
    void queue.send(`help-open-${Date.now()}`, "HelpOpened", {});
    void renderHelp(hud, client, hud.objectiveBlock);
    refresh();
  });
  el("help-close").addEventListener("click", () => {
    closeHelp(hud);
    el("help-panel").style.display = "none";
  });
  el("dialogue-dismiss").addEventListener("click", () => {
    dismissDialogue(hud);
    renderHud(hud);
  });
  el("assist-button").addEventListener("click", async () => {
    if (!hud.objectiveBlock) return;
    const decision = await client.assist(session, hud.objectiveBlock);
    applyAssistance(hud, scene, decision);
    refresh();
  });

  const moodBar = el("mood-bar");
  for (const label of MOODS) {
    const button = document.createElement("button");
    button.textContent = label;
    button.addEventListener("click", () => {
      void mood.choose(label);
      moodBar.style.display = "none";
    });
    moodBar.append(button);
  }
  setInterval(() => {
    mood.prompt();
    moodBar.style.display = "block";
  }, 120_000);

  // Activity panels attach to the objective station on interaction.
  el("play-button").addEventListener("click", async () => {
    const block = hud.objectiveBlock;
    if (!block || !interact(scene, block)) return;
    const content = await client.content(block, session);
    void queue.send(`enter-${block}-${Date.now()}`, "BlockEntered", { block });
    const kind = content.activity.kind;
    if (kind === "code_task") {
      const panel = new CodePanel(client, session, block);
      panel.loadStarter((content.activity.starter as string) ?? "");
      const editor = el<HTMLTextAreaElement>("editor");
      editor.value = panel.source;
      el("editor-wrap").style.display = "block";
      el("editor-submit").onclick = async () => {
        panel.source = editor.value;
        const result = await panel.submit();
        hud.lastGrade = result.score;
        el("editor-diagnostics").textContent = result.diagnostics
          .map((d) => `${d.line}:${d.column} ${d.severity}: ${d.message}`)
          .concat(result.violations.map((v) => `[${v.check}] ${v.message}`))
          .join("\n");
        if (panel.animator) {
          const traceBox = el("trace");
          panel.animator.playAll((row, highlighted) => {
            const line = document.createElement("div");
            line.textContent = `t=${row.tick} ${row.state} ns=${row.ns} ew=${row.ew}`;
            if (highlighted) line.style.background = "#7f1d1d";
            traceBox.append(line);
          });
        }
        refresh();
      };
    } else if (kind === "binary_match") {
      const panel = new BinaryMatchPanel(client, session, block, () => Date.now(), queue);
      alert(await panel.enter());
      panel.beginPlay();
      el("minigame-wrap").style.display = "block";
    } else if (kind === "phase_order") {
      const panel = new PhaseOrderPanel(client, session, block, queue);
      alert(await panel.enter());
      el("minigame-wrap").style.display = "block";
    }
  });

  refresh();
}

boot().catch((error) => {
  console.error(error);
  const status = document.getElementById("objective-text");
  if (status) status.textContent = "could not reach the tutoring service";
});
