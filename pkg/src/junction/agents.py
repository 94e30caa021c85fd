"""Per-block tutor agents: tabular Q-learning over assistance actions.

One agent per content block. The table maps (discretized student state,
action id) to a value; rewards are clamped deltas between the scored attempt
after an assistance decision and the score before it. Tables are tiny
(135 states x at most 7 actions), which keeps learning exact and auditable.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CorruptSnapshot, EmptyCatalog, OutOfRangeScore, UnknownAction
from .telemetry import TutorState

DEFAULT_ALPHA = 0.1
DEFAULT_GAMMA = 0.9
DEFAULT_EPSILON = 0.2
EPSILON_DECAY = 0.995
EPSILON_FLOOR = 0.01

SNAPSHOT_FORMAT = "tutor-agent-v1"


@dataclass
class TutorAgent:
    block_id: str
    actions: tuple[str, ...]  # catalog order; index 0 is NoAssist
    alpha: float = DEFAULT_ALPHA
    gamma: float = DEFAULT_GAMMA
    epsilon: float = DEFAULT_EPSILON
    q: dict[tuple[str, str], float] = field(default_factory=dict)
    visits: dict[tuple[str, str], int] = field(default_factory=dict)

    def q_value(self, state_key: str, action: str) -> float:
        return self.q.get((state_key, action), 0.0)

    def best_action(self, state_key: str) -> str:
        """Greedy action; max keeps the first of equals, i.e. catalog order."""
        if not self.actions:
            raise EmptyCatalog(f"agent for block {self.block_id!r} has no actions")
        return max(self.actions, key=lambda a: self.q_value(state_key, a))

    def greedy_ties(self, state_key: str) -> list[str]:
        best = max(self.q_value(state_key, a) for a in self.actions)
        return [a for a in self.actions if self.q_value(state_key, a) == best]

    def state_visits(self, state_key: str) -> int:
        return sum(n for (s, _), n in self.visits.items() if s == state_key)

    def visited_states(self) -> set[str]:
        return {s for s, _ in self.visits}


def _state_key(state: TutorState | str) -> str:
    return state.key() if isinstance(state, TutorState) else state


def choose_action(
    agent: TutorAgent,
    state: TutorState | str,
    mode: str = "exploit",
    rng: random.Random | int | None = None,
) -> str:
    """Pick an action id from the agent's catalog.

    exploit: argmax with catalog-order tie break. explore: argmax with
    probability 1 - epsilon, otherwise uniform over the catalog. Deterministic
    for a given rng seed.
    """
    if not agent.actions:
        raise EmptyCatalog(f"agent for block {agent.block_id!r} has no actions")
    key = _state_key(state)
    if mode == "exploit":
        return agent.best_action(key)
    if mode != "explore":
        raise ValueError(f"mode must be 'exploit' or 'explore', got {mode!r}")
    if isinstance(rng, int):
        rng = random.Random(rng)
    elif rng is None:
        rng = random.Random()
    if rng.random() < agent.epsilon:
        return agent.actions[rng.randrange(len(agent.actions))]
    return agent.best_action(key)


def reward_from(score_before: float | None, score_after: float) -> float:
    """Clamped improvement of the attempt after assistance over the one before.

    An absent before-score counts as 0, so the first scored attempt rewards
    raw performance.
    """
    if not 0.0 <= score_after <= 1.0:
        raise OutOfRangeScore(f"score_after {score_after!r} outside [0, 1]")
    if score_before is None:
        score_before = 0.0
    elif not 0.0 <= score_before <= 1.0:
        raise OutOfRangeScore(f"score_before {score_before!r} outside [0, 1]")
    return max(-1.0, min(1.0, score_after - score_before))


def update(
    agent: TutorAgent,
    state: TutorState | str,
    action: str,
    reward: float,
    next_state: TutorState | str | None = None,
) -> TutorAgent:
    """One Q-learning step; next_state=None means the step chain terminated.

    Touches exactly one table cell: q(s,a) += alpha * (r + gamma*max_a' q(s',a') - q(s,a)).
    """
    if action not in agent.actions:
        raise UnknownAction(f"action {action!r} not in catalog for block {agent.block_id!r}")
    key = _state_key(state)
    if next_state is None:
        best_next = 0.0
    else:
        next_key = _state_key(next_state)
        best_next = max(agent.q_value(next_key, a) for a in agent.actions)
    old = agent.q_value(key, action)
    agent.q[(key, action)] = old + agent.alpha * (reward + agent.gamma * best_next - old)
    agent.visits[(key, action)] = agent.visits.get((key, action), 0) + 1
    return agent


def decay_epsilon(agent: TutorAgent, rate: float = EPSILON_DECAY, floor: float = EPSILON_FLOOR) -> None:
    agent.epsilon = max(floor, agent.epsilon * rate)


def snapshot(agent: TutorAgent) -> dict:
    """Lossless snapshot document; float values stored as hex."""
    return {
        "format": SNAPSHOT_FORMAT,
        "block_id": agent.block_id,
        "actions": list(agent.actions),
        "alpha": agent.alpha.hex(),
        "gamma": agent.gamma.hex(),
        "epsilon": agent.epsilon.hex(),
        "q": [[s, a, v.hex()] for (s, a), v in sorted(agent.q.items())],
        "visits": [[s, a, n] for (s, a), n in sorted(agent.visits.items())],
    }


def snapshot_json(agent: TutorAgent) -> str:
    return json.dumps(snapshot(agent), sort_keys=True, separators=(",", ":")) + "\n"


def restore(doc: dict | str) -> TutorAgent:
    """Inverse of snapshot; bit-exact for every float field."""
    try:
        if isinstance(doc, str):
            doc = json.loads(doc)
        if doc["format"] != SNAPSHOT_FORMAT:
            raise CorruptSnapshot(f"unknown snapshot format {doc['format']!r}")
        agent = TutorAgent(
            block_id=doc["block_id"],
            actions=tuple(doc["actions"]),
            alpha=float.fromhex(doc["alpha"]),
            gamma=float.fromhex(doc["gamma"]),
            epsilon=float.fromhex(doc["epsilon"]),
        )
        for s, a, v in doc["q"]:
            agent.q[(s, a)] = float.fromhex(v)
        for s, a, n in doc["visits"]:
            agent.visits[(s, a)] = int(n)
        return agent
    except CorruptSnapshot:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise CorruptSnapshot(f"unreadable agent snapshot: {exc}") from exc


def write_snapshot(agent: TutorAgent, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{agent.block_id}.agent.json"
    path.write_text(snapshot_json(agent), encoding="utf-8")
    return path


def read_snapshot(path: str | Path) -> TutorAgent:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorruptSnapshot(f"cannot read snapshot {path}: {exc}") from exc
    return restore(text)


def load_agent_dir(directory: str | Path) -> dict[str, TutorAgent]:
    agents: dict[str, TutorAgent] = {}
    for path in sorted(Path(directory).glob("*.agent.json")):
        agent = read_snapshot(path)
        agents[agent.block_id] = agent
    return agents
