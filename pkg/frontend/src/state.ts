/**
 * Headless game state: the HUD and the 2D map scene.
 *
 * Two rules are load-bearing and enforced structurally here:
 *  - the help panel opens ONLY from userOpensHelp (a user click); nothing
 *    the server sends can open it, only badge it;
 *  - the HUD waypoint always points at the current objective's station.
 */

import type { AssistanceDecision, ObjectiveInfo } from "./api.js";

export interface Vec {
  x: number;
  y: number;
}

export interface Station {
  block: string;
  title: string;
  pos: Vec;
  locked: boolean;
}

export interface Dialogue {
  text: string;
  dismissible: true;
}

export interface HudState {
  objectiveBlock: string | null;
  objectiveTitle: string;
  objectiveText: string;
  waypoint: Vec | null;
  badges: Set<string>;
  helpPanel: { open: boolean; section: string | null };
  helpTarget: string | null; // section a notification points at, shown on open
  dialogue: Dialogue | null;
  stale: boolean;
  lastGrade: number | null;
}

export interface MapScene {
  stations: Map<string, Station>;
  areas: Map<string, boolean>; // remedial areas: id -> unlocked
  player: Vec;
}

const GRID_STEP = 4;

export function newHud(): HudState {
  return {
    objectiveBlock: null,
    objectiveTitle: "",
    objectiveText: "",
    waypoint: null,
    badges: new Set(),
    helpPanel: { open: false, section: null },
    helpTarget: null,
    dialogue: null,
    stale: false,
    lastGrade: null,
  };
}

/** One station per content block, laid out deterministically on a grid. */
export function newScene(blocks: { id: string; title: string }[]): MapScene {
  const stations = new Map<string, Station>();
  blocks.forEach((block, i) => {
    stations.set(block.id, {
      block: block.id,
      title: block.title,
      pos: { x: 2 + (i % 3) * GRID_STEP, y: 2 + Math.floor(i / 3) * GRID_STEP },
      locked: true,
    });
  });
  return { stations, areas: new Map(), player: { x: 0, y: 0 } };
}

/** Waypoint, objective text and station locks follow the server's answer. */
export function applyObjective(hud: HudState, scene: MapScene, info: ObjectiveInfo): void {
  const unlocked = new Set(info.unlocked);
  for (const station of scene.stations.values()) {
    station.locked = !unlocked.has(station.block) && !info.completed.includes(station.block);
  }
  hud.stale = false;
  if (info.objective === null) {
    hud.objectiveBlock = null;
    hud.objectiveTitle = "";
    hud.objectiveText = "All stations complete. Head to the exit!";
    hud.waypoint = null;
    return;
  }
  const station = scene.stations.get(info.objective.block);
  hud.objectiveBlock = info.objective.block;
  hud.objectiveTitle = info.objective.title;
  hud.objectiveText = `Current objective: ${info.objective.title}`;
  hud.waypoint = station ? { ...station.pos } : null;
}

export function markStale(hud: HudState): void {
  hud.stale = true; // keep the old waypoint; just flag it
}

/**
 * Fold an assistance decision into the interface. Doc/video suggestions and
 * help-menu marks only ever badge the menu; dialogue pops a dismissible
 * bubble; gate changes unlock remedial areas. Nothing here touches
 * hud.helpPanel.
 */
export function applyAssistance(hud: HudState, scene: MapScene, decision: AssistanceDecision): void {
  const { action } = decision;
  switch (action.kind) {
    case "NoAssist":
      return;
    case "HintText":
    case "PlayDialogue":
      hud.dialogue = { text: action.payload ?? "", dismissible: true };
      return;
    case "ShowDocSection":
    case "SuggestVideo":
    case "MarkHelpMenu":
      hud.badges.add("help");
      if (action.kind === "ShowDocSection") hud.helpTarget = action.payload;
      return;
    case "GateRemedialArea":
      if (action.payload) scene.areas.set(action.payload, true);
      return;
    default:
      console.warn(`ignoring unknown assistance kind ${action.kind}`);
  }
}

export function dismissDialogue(hud: HudState): void {
  hud.dialogue = null;
}

/** The single entry point that opens help; call it from a click handler only. */
export function userOpensHelp(hud: HudState): void {
  hud.helpPanel.open = true;
  hud.helpPanel.section = hud.helpTarget;
  hud.badges.delete("help");
}

export function closeHelp(hud: HudState): void {
  hud.helpPanel.open = false;
}

export function interact(scene: MapScene, block: string): boolean {
  const station = scene.stations.get(block);
  return station !== undefined && !station.locked;
}
