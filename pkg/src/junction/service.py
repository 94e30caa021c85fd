"""Session service: ties curriculum, telemetry, tutors and grading together.

State handling is event-sourced: every state change flows through a single
reducer (_apply) driven by the event log, for live requests and for replay
alike. Rebuilding a service from its log therefore reproduces the agent
tables bit-exactly, which doubles as the audit mechanism.
"""

from __future__ import annotations

import hashlib
import random
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from . import activities
from .agents import TutorAgent, choose_action, reward_from, snapshot_json, update
from .cohort import SimConfig, StudentArchetype, TrainResult, cohort_from_mix, make_agents, train
from .curriculum import ActivityKind, AssistanceAction, AssistKind, BlockGraph, unlocked_blocks
from .errors import (
    BlockLocked,
    InvalidPayload,
    UnknownCurriculum,
    UnknownSession,
    WrongActivityType,
)
from .lang import check as check_program
from .lang import grade as grade_program
from .lang import parse as parse_program
from .lang import simulate
from .lang.diagnostics import ERROR
from .lang.grading import Rubric
from .telemetry import (
    DEFAULT_COHORT_MEDIAN_SECONDS,
    EventLog,
    EventType,
    TelemetryEvent,
    discretize,
    features_for,
)

_SCORED = {EventType.QUIZ_SUBMITTED, EventType.CODE_SUBMITTED}

# How each assistance kind reaches the player. Doc and video suggestions only
# ever badge the help menu; nothing is allowed to open help for the student.
_DELIVERY = {
    AssistKind.NO_ASSIST: "popup_dialogue",
    AssistKind.HINT_TEXT: "popup_dialogue",
    AssistKind.PLAY_DIALOGUE: "popup_dialogue",
    AssistKind.SHOW_DOC_SECTION: "help_menu_notification",
    AssistKind.SUGGEST_VIDEO: "help_menu_notification",
    AssistKind.MARK_HELP_MENU: "help_menu_notification",
    AssistKind.GATE_REMEDIAL_AREA: "gate_change",
}


@dataclass
class PendingAssist:
    action: str
    state_key: str
    prev_score: float | None


@dataclass
class Session:
    id: str
    curriculum_id: str
    completed: set[str] = field(default_factory=set)
    objective: str | None = None
    benchmark: float | None = None
    pending: dict[str, PendingAssist] = field(default_factory=dict)


@dataclass(frozen=True)
class AssistanceDecision:
    block: str
    action: AssistanceAction
    delivery: str
    mandatory_open: bool = False


@dataclass(frozen=True)
class SubmitResult:
    kind: ActivityKind
    score: float
    correct: bool | None = None
    diagnostics: tuple = ()
    violations: tuple = ()
    trace: tuple = ()


def _round_seed(session_id: str, block_id: str) -> int:
    digest = hashlib.sha256(f"{session_id}:{block_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


class TutorService:
    """One curriculum, one event log, one agent per block."""

    def __init__(
        self,
        graph: BlockGraph,
        agents: dict[str, TutorAgent] | None = None,
        log: EventLog | None = None,
        *,
        rubric: Rubric | None = None,
        archetypes: dict[str, StudentArchetype] | None = None,
        default_mix: list[tuple[str, int]] | None = None,
        train_mode: bool = False,
        seed: int = 0,
        cohort_median: float = DEFAULT_COHORT_MEDIAN_SECONDS,
        clock: Callable[[], int] | None = None,
    ):
        self.graph = graph
        self.agents = agents if agents is not None else make_agents(graph)
        self.log = log if log is not None else EventLog()
        self.rubric = rubric
        self.archetypes = archetypes or {}
        self.default_mix = default_mix or []
        self.train_mode = train_mode
        self.cohort_median = cohort_median
        self.rng = random.Random(seed)
        self.sessions: dict[str, Session] = {}
        self._clock = clock if clock is not None else (lambda: int(time.time() * 1000))
        self._lock = threading.RLock()
        # Resume: fold any events already in the log into session/agent state.
        existing = self.log.snapshot()
        for i, event in enumerate(existing):
            self._apply(event, existing[: i + 1])

    # ------------------------------------------------------------------ state

    def _first_objective(self, completed: set[str]) -> str | None:
        unlocked = unlocked_blocks(self.graph, completed)
        for block_id in self.graph.topo_order:
            if block_id in unlocked:
                return block_id
        return None

    def _apply(self, event: TelemetryEvent, prefix: Sequence[TelemetryEvent]) -> None:
        """Reducer: folds one event into sessions and agents.

        Everything here depends only on the event and the log prefix ending
        at that event, so replaying a log rebuilds identical state.
        """
        if event.type is EventType.SESSION_STARTED:
            self.sessions[event.session] = Session(
                id=event.session,
                curriculum_id=event.payload["curriculum_id"],
                objective=self._first_objective(set()),
            )
            return
        session = self.sessions.get(event.session)
        if session is None:
            return
        if event.type is EventType.ASSISTANCE_SHOWN:
            session.pending[event.payload["block"]] = PendingAssist(
                action=event.payload["action"],
                state_key=event.payload["state"],
                prev_score=event.payload.get("prev_score"),
            )
        elif event.type in _SCORED:
            block_id = event.payload["block"]
            score = event.payload.get("score", event.payload.get("grade"))
            pending = session.pending.pop(block_id, None)
            agent = self.agents.get(block_id)
            if pending is not None and agent is not None:
                reward = reward_from(pending.prev_score, float(score))
                next_state = discretize(features_for(prefix, session.id, block_id), self.cohort_median)
                update(agent, pending.state_key, pending.action, reward, next_state)
        elif event.type is EventType.BLOCK_COMPLETED:
            block_id = event.payload["block"]
            session.pending.pop(block_id, None)  # completed without a scored attempt: no reward
            session.completed.add(block_id)
            if block_id == self.graph.entry_block and session.benchmark is None:
                session.benchmark = features_for(prefix, session.id, block_id).latest_score
            session.objective = self._first_objective(session.completed)

    def _append(self, *, session: str, type: EventType, payload: dict[str, Any], ts: int | None = None) -> int:
        with self._lock:
            seq = self.log.append(
                ts=self._clock() if ts is None else ts, session=session, type=type, payload=payload
            )
            prefix = self.log.snapshot()
            self._apply(prefix[-1], prefix)
            return seq

    def _session(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no such session: {session_id!r}")
        return session

    # ------------------------------------------------------------------- ops

    def open_session(self, curriculum_id: str | None = None, ts: int | None = None) -> Session:
        if curriculum_id is not None and curriculum_id != self.graph.curriculum_id:
            raise UnknownCurriculum(f"this service hosts {self.graph.curriculum_id!r}, not {curriculum_id!r}")
        session_id = uuid.uuid4().hex[:12]
        self._append(
            session=session_id,
            type=EventType.SESSION_STARTED,
            payload={"curriculum_id": self.graph.curriculum_id, "seed": self.rng.getrandbits(32)},
            ts=ts,
        )
        return self.sessions[session_id]

    def ingest(self, session_id: str, type: EventType | str, payload: dict[str, Any], ts: int | None = None) -> int:
        self._session(session_id)
        try:
            event_type = EventType(type)
        except ValueError:
            raise InvalidPayload(f"type: unknown event type {type!r}") from None
        if event_type is EventType.SESSION_STARTED:
            raise InvalidPayload("type: SessionStarted is emitted by the service, not ingested")
        block_id = payload.get("block") if isinstance(payload, dict) else None
        if block_id is not None and block_id not in self.graph.blocks:
            raise InvalidPayload(f"block: no such block {block_id!r}")
        return self._append(session=session_id, type=event_type, payload=payload, ts=ts)

    def request_assistance(self, session_id: str, block_id: str, ts: int | None = None) -> AssistanceDecision:
        session = self._session(session_id)
        block = self.graph.block(block_id)  # raises UnknownBlockId
        with self._lock:
            if block_id not in unlocked_blocks(self.graph, session.completed):
                raise BlockLocked(f"block {block_id!r} is not unlocked for session {session_id!r}")
            prefix = self.log.snapshot()
            features = features_for(prefix, session_id, block_id)
            state = discretize(features, self.cohort_median)
            agent = self.agents[block_id]
            mode = "explore" if self.train_mode else "exploit"
            action_id = choose_action(agent, state, mode=mode, rng=self.rng)
            self._append(
                session=session_id,
                type=EventType.ASSISTANCE_SHOWN,
                payload={
                    "block": block_id,
                    "action": action_id,
                    "state": state.key(),
                    "prev_score": features.latest_score,
                },
                ts=ts,
            )
        action = next(a for a in block.assistance if a.id == action_id)
        return AssistanceDecision(block=block_id, action=action, delivery=_DELIVERY[action.kind])

    def submit_code(self, session_id: str, block_id: str, source: str, ts: int | None = None) -> SubmitResult:
        block = self.graph.block(block_id)
        if block.activity.kind is not ActivityKind.CODE_TASK:
            raise WrongActivityType(f"block {block_id!r} is a {block.activity.kind.value}, not a code task")
        return self.submit(session_id, block_id, {"source": source}, ts=ts)

    def submit(self, session_id: str, block_id: str, body: dict[str, Any], ts: int | None = None) -> SubmitResult:
        """Score a submission for the block's activity and log the attempt."""
        self._session(session_id)
        block = self.graph.block(block_id)
        kind = block.activity.kind
        params = block.activity.params

        if kind is ActivityKind.CODE_TASK:
            source = body.get("source")
            if not isinstance(source, str):
                raise InvalidPayload("source: expected the controller source text")
            result = self._grade_code(source)
            self._append(
                session=session_id,
                type=EventType.CODE_SUBMITTED,
                payload={"block": block_id, "source": source, "grade": result.score},
                ts=ts,
            )
            return result

        if kind is ActivityKind.QUIZ:
            responses = body.get("responses")
            if not isinstance(responses, dict):
                raise InvalidPayload("responses: expected a mapping of item id to answer")
            key = {item["id"]: item["answer"] for item in params["items"]}
            score = activities.score_test(key, responses)
        elif kind is ActivityKind.BINARY_MATCH:
            matches = body.get("matches")
            if not isinstance(matches, dict):
                raise InvalidPayload("matches: expected a mapping of binary string to decimal")
            elapsed = body.get("elapsed")
            if not isinstance(elapsed, (int, float)) or elapsed < 0:
                raise InvalidPayload("elapsed: expected a non-negative number of seconds")
            round_ = self.binary_round(session_id, block_id)
            score = activities.score_binary_round(round_, matches, float(elapsed))
        elif kind is ActivityKind.PHASE_ORDER:
            order = body.get("order")
            if not isinstance(order, list) or not all(isinstance(p, str) for p in order):
                raise InvalidPayload("order: expected a list of phase ids")
            puzzle = activities.PhaseOrderPuzzle(
                reference_cycle=tuple(params["phases"]), submitted=tuple(order)
            )
            correct, score = activities.check_phase_order(puzzle)
            self._append(
                session=session_id,
                type=EventType.QUIZ_SUBMITTED,
                payload={"block": block_id, "score": score},
                ts=ts,
            )
            return SubmitResult(kind=kind, score=score, correct=correct)
        else:  # pragma: no cover - exhaustive over ActivityKind
            raise WrongActivityType(f"cannot submit to activity kind {kind!r}")

        self._append(
            session=session_id,
            type=EventType.QUIZ_SUBMITTED,
            payload={"block": block_id, "score": score},
            ts=ts,
        )
        return SubmitResult(kind=kind, score=score)

    def _grade_code(self, source: str) -> SubmitResult:
        parsed = parse_program(source)
        if not parsed.ok:
            return SubmitResult(kind=ActivityKind.CODE_TASK, score=0.0, diagnostics=tuple(parsed.diagnostics))
        diagnostics = tuple(check_program(parsed.program))
        if any(d.severity == ERROR for d in diagnostics):
            return SubmitResult(kind=ActivityKind.CODE_TASK, score=0.0, diagnostics=diagnostics)
        if self.rubric is None:
            raise InvalidPayload("service has no rubric configured for code grading")
        score, violations = grade_program(parsed.program, self.rubric)
        demo = self.rubric.scenarios[0]
        trace = simulate(parsed.program, demo.updates, demo.ticks)
        return SubmitResult(
            kind=ActivityKind.CODE_TASK,
            score=score,
            diagnostics=diagnostics,
            violations=tuple(violations),
            trace=tuple(trace),
        )

    def binary_round(self, session_id: str, block_id: str):
        params = self.graph.block(block_id).activity.params
        return activities.gen_binary_round(
            difficulty=int(params.get("difficulty", 4)),
            count=int(params.get("count", 6)),
            seed=_round_seed(session_id, block_id),
            time_limit=float(params.get("time_limit", 60.0)),
        )

    def objective(self, session_id: str) -> dict[str, Any]:
        session = self._session(session_id)
        block = self.graph.blocks.get(session.objective) if session.objective else None
        return {
            "session": session.id,
            "objective": {"block": block.id, "title": block.title} if block else None,
            "completed": sorted(session.completed),
            "unlocked": sorted(unlocked_blocks(self.graph, session.completed)),
            "benchmark": session.benchmark,
        }

    def pretrain(self, episodes: int, seed: int, mix: list[tuple[str, int]] | None = None) -> TrainResult:
        """Warm up the live agents against the configured synthetic cohort."""
        roster = mix if mix is not None else self.default_mix
        if not roster or not self.archetypes:
            raise InvalidPayload("no archetype mix configured for training")
        cohort = cohort_from_mix(self.archetypes, roster, seed)
        with self._lock:
            return train(self.agents, self.graph, cohort, episodes, seed, SimConfig(cohort_median_seconds=self.cohort_median))

    def report(self) -> list[activities.CohortReport]:
        """Pre/post rows for every session that has both scores."""
        rows = session_pre_post(self)
        return activities.cohort_report([(self.graph.curriculum_id, rows)])

    def agent_snapshots(self) -> dict[str, str]:
        return {block_id: snapshot_json(agent) for block_id, agent in sorted(self.agents.items())}


def session_pre_post(service: TutorService) -> list[tuple[float, float]]:
    events = service.log.snapshot()
    rows = []
    for session in service.sessions.values():
        pre = session.benchmark
        post = features_for(events, session.id, service.graph.final_block).latest_score
        if pre is not None and post is not None:
            rows.append((pre, post))
    return rows


def rebuild(
    graph: BlockGraph,
    events: Iterable[TelemetryEvent],
    agents: dict[str, TutorAgent] | None = None,
    *,
    cohort_median: float = DEFAULT_COHORT_MEDIAN_SECONDS,
) -> TutorService:
    """Replay a recorded event stream into a fresh service.

    With the same starting agents the rebuilt Q-tables match the original
    run bit for bit; compare snapshots with verify_snapshots().
    """
    service = TutorService(graph, agents=agents, log=EventLog(), cohort_median=cohort_median)
    for event in events:
        service._append(session=event.session, type=event.type, payload=event.payload, ts=event.ts)
    return service


def verify_snapshots(service: TutorService, saved: dict[str, str]) -> list[str]:
    """Names of blocks whose rebuilt snapshot differs from the saved one."""
    current = service.agent_snapshots()
    mismatched = [block for block, text in saved.items() if current.get(block) != text]
    mismatched.extend(block for block in current if block not in saved)
    return sorted(set(mismatched))
