"""Curriculum model: content blocks, prerequisite DAG, assistance catalogs.

A curriculum is a declarative YAML document loaded into an immutable
BlockGraph. Blocks partition the material into separately tutorable units;
each block carries an activity, its help documentation, and the catalog of
assistance actions the tutor may choose from. Prerequisites form a DAG so
that linear curricula are just chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable

import yaml

from .errors import (
    MalformedDocument,
    MissingNoAssist,
    PrerequisiteCycle,
    UnknownBlockId,
    UnknownPrerequisite,
)


class ActivityKind(str, Enum):
    QUIZ = "quiz"
    BINARY_MATCH = "binary_match"
    PHASE_ORDER = "phase_order"
    CODE_TASK = "code_task"


class AssistKind(str, Enum):
    NO_ASSIST = "NoAssist"
    HINT_TEXT = "HintText"
    SHOW_DOC_SECTION = "ShowDocSection"
    PLAY_DIALOGUE = "PlayDialogue"
    SUGGEST_VIDEO = "SuggestVideo"
    MARK_HELP_MENU = "MarkHelpMenu"
    GATE_REMEDIAL_AREA = "GateRemedialArea"


@dataclass(frozen=True)
class AssistanceAction:
    """One intervention the tutor can deliver (or NoAssist for none)."""

    id: str
    kind: AssistKind
    payload: str | None = None


@dataclass(frozen=True)
class HelpSection:
    id: str
    title: str
    body: str
    media: str | None = None


@dataclass(frozen=True)
class ActivitySpec:
    kind: ActivityKind
    params: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ContentBlock:
    id: str
    title: str
    prerequisites: tuple[str, ...]
    activity: ActivitySpec
    help_sections: tuple[HelpSection, ...]
    assistance: tuple[AssistanceAction, ...]

    def help_section(self, section_id: str) -> HelpSection | None:
        for section in self.help_sections:
            if section.id == section_id:
                return section
        return None


@dataclass(frozen=True)
class BlockGraph:
    """Validated curriculum. Immutable after load; safe to share."""

    curriculum_id: str
    blocks: dict[str, ContentBlock]
    topo_order: tuple[str, ...]

    @property
    def entry_block(self) -> str:
        return self.topo_order[0]

    @property
    def final_block(self) -> str:
        return self.topo_order[-1]

    def block(self, block_id: str) -> ContentBlock:
        try:
            return self.blocks[block_id]
        except KeyError:
            raise UnknownBlockId(f"no such block: {block_id!r}") from None


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise MalformedDocument(msg)


def _as_str(value: Any, where: str) -> str:
    _require(isinstance(value, str) and value != "", f"{where}: expected a non-empty string")
    return value


def _parse_assistance(raw: Any, block_id: str, help_ids: set[str]) -> tuple[AssistanceAction, ...]:
    _require(isinstance(raw, list), f"block {block_id!r}: 'assistance' must be a list")
    actions: list[AssistanceAction] = []
    seen: set[str] = set()
    for i, item in enumerate(raw):
        where = f"block {block_id!r}, assistance[{i}]"
        _require(isinstance(item, dict), f"{where}: expected a mapping")
        action_id = _as_str(item.get("id"), f"{where}.id")
        _require(action_id not in seen, f"{where}: duplicate action id {action_id!r}")
        seen.add(action_id)
        kind_raw = _as_str(item.get("kind"), f"{where}.kind")
        try:
            kind = AssistKind(kind_raw)
        except ValueError:
            raise MalformedDocument(f"{where}: unknown assistance kind {kind_raw!r}") from None
        payload = item.get("payload")
        if payload is not None:
            payload = _as_str(payload, f"{where}.payload")
        if kind is AssistKind.SHOW_DOC_SECTION:
            if payload not in help_ids:
                raise MalformedDocument(
                    f"{where}: ShowDocSection payload {payload!r} does not name a help section"
                )
        actions.append(AssistanceAction(id=action_id, kind=kind, payload=payload))

    no_assist = [a for a in actions if a.kind is AssistKind.NO_ASSIST]
    if not no_assist:
        raise MissingNoAssist(f"block {block_id!r}: assistance catalog has no NoAssist action")
    _require(len(no_assist) == 1, f"block {block_id!r}: more than one NoAssist action")
    # Catalog order is stable: NoAssist first, the rest in document order.
    ordered = no_assist + [a for a in actions if a.kind is not AssistKind.NO_ASSIST]
    return tuple(ordered)


def _parse_block(raw: Any, index: int) -> ContentBlock:
    _require(isinstance(raw, dict), f"blocks[{index}]: expected a mapping")
    block_id = _as_str(raw.get("id"), f"blocks[{index}].id")
    title = _as_str(raw.get("title"), f"block {block_id!r}.title")

    prereqs_raw = raw.get("prerequisites", [])
    _require(isinstance(prereqs_raw, list), f"block {block_id!r}: 'prerequisites' must be a list")
    prereqs = tuple(_as_str(p, f"block {block_id!r}.prerequisites[{i}]") for i, p in enumerate(prereqs_raw))

    activity_raw = raw.get("activity")
    _require(isinstance(activity_raw, dict), f"block {block_id!r}: 'activity' must be a mapping")
    kind_raw = _as_str(activity_raw.get("kind"), f"block {block_id!r}.activity.kind")
    try:
        activity_kind = ActivityKind(kind_raw)
    except ValueError:
        raise MalformedDocument(f"block {block_id!r}: unknown activity kind {kind_raw!r}") from None
    params = {k: v for k, v in activity_raw.items() if k != "kind"}

    sections_raw = raw.get("help_sections", [])
    _require(isinstance(sections_raw, list), f"block {block_id!r}: 'help_sections' must be a list")
    sections: list[HelpSection] = []
    section_ids: set[str] = set()
    for i, item in enumerate(sections_raw):
        where = f"block {block_id!r}, help_sections[{i}]"
        _require(isinstance(item, dict), f"{where}: expected a mapping")
        sec_id = _as_str(item.get("id"), f"{where}.id")
        _require(sec_id not in section_ids, f"{where}: duplicate section id {sec_id!r}")
        section_ids.add(sec_id)
        media = item.get("media")
        if media is not None:
            media = _as_str(media, f"{where}.media")
        sections.append(
            HelpSection(
                id=sec_id,
                title=_as_str(item.get("title"), f"{where}.title"),
                body=_as_str(item.get("body"), f"{where}.body"),
                media=media,
            )
        )

    assistance = _parse_assistance(raw.get("assistance", []), block_id, section_ids)
    return ContentBlock(
        id=block_id,
        title=title,
        prerequisites=prereqs,
        activity=ActivitySpec(kind=activity_kind, params=params),
        help_sections=tuple(sections),
        assistance=assistance,
    )


def _topo_sort(blocks: dict[str, ContentBlock]) -> tuple[str, ...]:
    # Kahn's algorithm, preferring document order so the result is stable.
    remaining = {b: set(blocks[b].prerequisites) for b in blocks}
    order: list[str] = []
    while remaining:
        ready = [b for b in blocks if b in remaining and not remaining[b]]
        if not ready:
            cycle = _find_cycle(blocks, set(remaining))
            raise PrerequisiteCycle("prerequisite cycle: " + " -> ".join(cycle))
        for b in ready:
            order.append(b)
            del remaining[b]
        for deps in remaining.values():
            deps.difference_update(ready)
    return tuple(order)


def _find_cycle(blocks: dict[str, ContentBlock], candidates: set[str]) -> list[str]:
    # Walk prerequisite edges until a node repeats; candidates all sit on or
    # feed a cycle, so this terminates.
    node = next(iter(candidates))
    seen: list[str] = []
    while node not in seen:
        seen.append(node)
        node = next(p for p in blocks[node].prerequisites if p in candidates)
    start = seen.index(node)
    return seen[start:] + [node]


def load_curriculum(text: str) -> BlockGraph:
    """Parse and validate a curriculum document; returns an immutable graph."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise MalformedDocument(f"not a valid document{loc}: {exc}") from exc
    _require(isinstance(doc, dict), "document is empty or not a mapping")
    curriculum_id = _as_str(doc.get("curriculum_id"), "curriculum_id")
    blocks_raw = doc.get("blocks")
    _require(isinstance(blocks_raw, list) and len(blocks_raw) > 0, "'blocks' must be a non-empty list")

    blocks: dict[str, ContentBlock] = {}
    for i, raw in enumerate(blocks_raw):
        block = _parse_block(raw, i)
        _require(block.id not in blocks, f"duplicate block id {block.id!r}")
        blocks[block.id] = block

    for block in blocks.values():
        for p in block.prerequisites:
            if p not in blocks:
                raise UnknownPrerequisite(f"block {block.id!r} requires unknown block {p!r}")

    topo = _topo_sort(blocks)
    return BlockGraph(curriculum_id=curriculum_id, blocks=blocks, topo_order=topo)


def load_curriculum_path(path: str | Path) -> BlockGraph:
    return load_curriculum(Path(path).read_text(encoding="utf-8"))


def dumps_curriculum(graph: BlockGraph) -> str:
    """Serialize a graph back to document form (round-trips through load)."""
    doc = {
        "curriculum_id": graph.curriculum_id,
        "blocks": [
            {
                "id": b.id,
                "title": b.title,
                "prerequisites": list(b.prerequisites),
                "activity": {"kind": b.activity.kind.value, **b.activity.params},
                "help_sections": [
                    {"id": s.id, "title": s.title, "body": s.body, "media": s.media}
                    for s in b.help_sections
                ],
                "assistance": [
                    {"id": a.id, "kind": a.kind.value, "payload": a.payload}
                    for a in b.assistance
                ],
            }
            for b in graph.blocks.values()
        ],
    }
    return yaml.safe_dump(doc, sort_keys=False, allow_unicode=True)


def unlocked_blocks(graph: BlockGraph, completed: Iterable[str]) -> set[str]:
    """Blocks not yet completed whose prerequisites are all completed."""
    done = set(completed)
    for b in done:
        if b not in graph.blocks:
            raise UnknownBlockId(f"no such block: {b!r}")
    return {
        b.id
        for b in graph.blocks.values()
        if b.id not in done and all(p in done for p in b.prerequisites)
    }


def assistance_catalog(graph: BlockGraph, block_id: str) -> list[AssistanceAction]:
    """The block's assistance actions; NoAssist first, order stable."""
    return list(graph.block(block_id).assistance)
