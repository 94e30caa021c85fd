"""Student interaction telemetry: event log, per-block features, RL state.

Events are append-only and newline-delimited JSON on disk; everything
downstream (features, discretized tutor state, agent updates) is a pure
function of a log prefix, which is what makes replay a usable audit tool.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Iterator

from .errors import CorruptLog, InvalidPayload, StorageFailure


class EventType(str, Enum):
    SESSION_STARTED = "SessionStarted"
    BLOCK_ENTERED = "BlockEntered"
    QUIZ_SUBMITTED = "QuizSubmitted"
    ACTIVITY_ACTION = "ActivityAction"
    INPUT_ACTIVITY = "InputActivity"
    EMOTION_SAMPLE = "EmotionSample"
    ASSISTANCE_SHOWN = "AssistanceShown"
    HELP_OPENED = "HelpOpened"
    CODE_SUBMITTED = "CodeSubmitted"
    BLOCK_COMPLETED = "BlockCompleted"


class EmotionLabel(str, Enum):
    ENGAGED = "engaged"
    NEUTRAL = "neutral"
    FRUSTRATED = "frustrated"
    BORED = "bored"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class TelemetryEvent:
    seq: int
    ts: int  # milliseconds since epoch
    session: str
    type: EventType
    payload: dict[str, Any]


# Fields every payload of a given type must carry. Extra fields are allowed
# (AssistanceShown records decision context on top of the required pair).
_SCORED_TYPES = {EventType.QUIZ_SUBMITTED, EventType.CODE_SUBMITTED}


def _check_score(value: Any, field: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise InvalidPayload(f"{field}: expected a number, got {value!r}")
    if not 0.0 <= float(value) <= 1.0:
        raise InvalidPayload(f"{field}: {value!r} outside [0, 1]")
    return float(value)


def _check_str(payload: dict[str, Any], field: str) -> str:
    value = payload.get(field)
    if not isinstance(value, str) or not value:
        raise InvalidPayload(f"{field}: expected a non-empty string, got {value!r}")
    return value


def _check_count(payload: dict[str, Any], field: str) -> int:
    value = payload.get(field)
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise InvalidPayload(f"{field}: expected a non-negative integer, got {value!r}")
    return value


def validate_payload(type: EventType, payload: dict[str, Any]) -> None:
    """Raise InvalidPayload naming the offending field."""
    if not isinstance(payload, dict):
        raise InvalidPayload(f"payload: expected a mapping, got {payload!r}")
    if type is EventType.SESSION_STARTED:
        _check_str(payload, "curriculum_id")
    elif type in (EventType.BLOCK_ENTERED, EventType.BLOCK_COMPLETED):
        _check_str(payload, "block")
    elif type is EventType.QUIZ_SUBMITTED:
        _check_str(payload, "block")
        _check_score(payload.get("score"), "score")
    elif type is EventType.CODE_SUBMITTED:
        _check_str(payload, "block")
        if not isinstance(payload.get("source"), str):
            raise InvalidPayload("source: expected a string")
        _check_score(payload.get("grade"), "grade")
    elif type is EventType.ACTIVITY_ACTION:
        _check_str(payload, "block")
        _check_count(payload, "count")
    elif type is EventType.INPUT_ACTIVITY:
        _check_count(payload, "mouse_moves")
        _check_count(payload, "key_presses")
        window = payload.get("window_seconds")
        if not isinstance(window, (int, float)) or isinstance(window, bool) or window < 0:
            raise InvalidPayload(f"window_seconds: expected a non-negative number, got {window!r}")
    elif type is EventType.EMOTION_SAMPLE:
        label = payload.get("label")
        try:
            EmotionLabel(label)
        except ValueError:
            raise InvalidPayload(f"label: {label!r} is not an emotion label") from None
    elif type is EventType.ASSISTANCE_SHOWN:
        _check_str(payload, "block")
        _check_str(payload, "action")
        if "prev_score" in payload and payload["prev_score"] is not None:
            _check_score(payload["prev_score"], "prev_score")
    # HelpOpened carries free-form context only.


def _event_line(event: TelemetryEvent) -> str:
    record = {
        "seq": event.seq,
        "ts": event.ts,
        "session": event.session,
        "type": event.type.value,
        "payload": event.payload,
    }
    return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _parse_line(line: str, lineno: int) -> TelemetryEvent:
    try:
        record = json.loads(line)
        return TelemetryEvent(
            seq=record["seq"],
            ts=record["ts"],
            session=record["session"],
            type=EventType(record["type"]),
            payload=record["payload"],
        )
    except (ValueError, KeyError, TypeError) as exc:
        raise CorruptLog(f"line {lineno}: {exc}") from exc


class EventLog:
    """Append-only event stream with atomic seq assignment.

    Single writer per log; appends are serialized under a lock and flushed
    (fsynced when durable=True) before the new seq is returned. Readers see
    a consistent prefix via snapshot().
    """

    def __init__(self, path: str | Path | None = None, durable: bool = True):
        self._events: list[TelemetryEvent] = []
        self._lock = threading.Lock()
        self._durable = durable
        self._path = Path(path) if path is not None else None
        self._fh = None
        if self._path is not None:
            if self._path.exists():
                self._load(self._path)
            self._path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = open(self._path, "a", encoding="utf-8")

    def _load(self, path: Path) -> None:
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            event = _parse_line(line, lineno)
            expected = len(self._events) + 1
            if event.seq != expected:
                raise CorruptLog(f"line {lineno}: seq {event.seq}, expected {expected}")
            self._events.append(event)

    def append(self, *, ts: int, session: str, type: EventType | str, payload: dict[str, Any]) -> int:
        """Validate, assign the next seq, persist, and return the seq."""
        event_type = EventType(type)
        if not session:
            raise InvalidPayload("session: expected a non-empty string")
        validate_payload(event_type, payload)
        with self._lock:
            seq = len(self._events) + 1
            event = TelemetryEvent(seq=seq, ts=ts, session=session, type=event_type, payload=payload)
            if self._fh is not None:
                try:
                    self._fh.write(_event_line(event) + "\n")
                    self._fh.flush()
                    if self._durable:
                        os.fsync(self._fh.fileno())
                except OSError as exc:
                    raise StorageFailure(str(exc)) from exc
            self._events.append(event)
            return seq

    def snapshot(self) -> list[TelemetryEvent]:
        with self._lock:
            return list(self._events)

    def __iter__(self) -> Iterator[TelemetryEvent]:
        return iter(self.snapshot())

    def __len__(self) -> int:
        with self._lock:
            return len(self._events)

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


def record_event(log: EventLog, *, ts: int, session: str, type: EventType | str, payload: dict[str, Any]) -> int:
    return log.append(ts=ts, session=session, type=type, payload=payload)


def read_log(path: str | Path) -> list[TelemetryEvent]:
    """Load a log file, checking the seq sequence is gap-free from 1."""
    events: list[TelemetryEvent] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        event = _parse_line(line, lineno)
        if event.seq != len(events) + 1:
            raise CorruptLog(f"line {lineno}: seq {event.seq}, expected {len(events) + 1}")
        events.append(event)
    return events


@dataclass(frozen=True)
class BlockFeatures:
    """Aggregates of one session's events for one block."""

    latest_score: float | None = None
    time_in_block: float = 0.0  # seconds
    attempts: int = 0
    activity_rate: float = 0.0  # input events per minute
    emotion_mode: EmotionLabel = EmotionLabel.UNKNOWN


def features_for(events: Iterable[TelemetryEvent], session_id: str, block_id: str) -> BlockFeatures:
    """Pure aggregate over the (session, block) subsequence of a log.

    Time in block sums intervals from each BlockEntered to the next
    BlockEntered (any block), the block's BlockCompleted, or the session's
    last event. Input activity and emotion samples attribute to the block
    the session is currently inside.
    """
    latest_score: float | None = None
    attempts = 0
    time_ms = 0
    open_since: int | None = None
    current_block: str | None = None
    mouse_keys = 0
    window_seconds = 0.0
    emotions: list[EmotionLabel] = []
    last_ts: int | None = None

    for ev in events:
        if ev.session != session_id:
            continue
        last_ts = ev.ts
        if ev.type is EventType.BLOCK_ENTERED:
            if open_since is not None:
                time_ms += ev.ts - open_since
                open_since = None
            current_block = ev.payload.get("block")
            if current_block == block_id:
                open_since = ev.ts
        elif ev.type is EventType.BLOCK_COMPLETED:
            completed = ev.payload.get("block")
            if completed == block_id and open_since is not None:
                time_ms += ev.ts - open_since
                open_since = None
            if completed == current_block:
                current_block = None
        elif ev.type in _SCORED_TYPES:
            if ev.payload.get("block") == block_id:
                attempts += 1
                score = ev.payload.get("score", ev.payload.get("grade"))
                if score is not None:
                    latest_score = float(score)
        elif ev.type is EventType.INPUT_ACTIVITY:
            if current_block == block_id:
                mouse_keys += ev.payload.get("mouse_moves", 0) + ev.payload.get("key_presses", 0)
                window_seconds += float(ev.payload.get("window_seconds", 0.0))
        elif ev.type is EventType.EMOTION_SAMPLE:
            if current_block == block_id:
                emotions.append(EmotionLabel(ev.payload["label"]))

    if open_since is not None and last_ts is not None:
        time_ms += last_ts - open_since

    if emotions:
        counts: dict[EmotionLabel, int] = {}
        last_index: dict[EmotionLabel, int] = {}
        for i, label in enumerate(emotions):
            counts[label] = counts.get(label, 0) + 1
            last_index[label] = i
        best = max(counts.values())
        # Ties break toward the label sampled most recently.
        mode = max((label for label, c in counts.items() if c == best), key=lambda lb: last_index[lb])
    else:
        mode = EmotionLabel.UNKNOWN

    rate = (mouse_keys / window_seconds) * 60.0 if window_seconds > 0 else 0.0
    return BlockFeatures(
        latest_score=latest_score,
        time_in_block=time_ms / 1000.0,
        attempts=attempts,
        activity_rate=rate,
        emotion_mode=mode,
    )


class ScoreBucket(str, Enum):
    LOW = "low"
    MID = "mid"
    HIGH = "high"


class TimeBucket(str, Enum):
    FAST = "fast"
    NORMAL = "normal"
    SLOW = "slow"


class AttemptsBucket(str, Enum):
    FIRST = "first"
    RETRY = "retry"
    MANY = "many"


# 3 score x 3 time x 5 emotion x 3 attempts buckets.
STATE_SPACE_SIZE = len(ScoreBucket) * len(TimeBucket) * len(EmotionLabel) * len(AttemptsBucket)

DEFAULT_COHORT_MEDIAN_SECONDS = 300.0


@dataclass(frozen=True)
class TutorState:
    score_bucket: ScoreBucket
    time_bucket: TimeBucket
    emotion: EmotionLabel
    attempts_bucket: AttemptsBucket

    def key(self) -> str:
        return "|".join(
            (self.score_bucket.value, self.time_bucket.value, self.emotion.value, self.attempts_bucket.value)
        )

    @classmethod
    def from_key(cls, key: str) -> "TutorState":
        score, time, emotion, attempts = key.split("|")
        return cls(ScoreBucket(score), TimeBucket(time), EmotionLabel(emotion), AttemptsBucket(attempts))


def discretize(features: BlockFeatures, cohort_median_time: float = DEFAULT_COHORT_MEDIAN_SECONDS) -> TutorState:
    """Map features onto the 135-cell tutor state space.

    Boundaries belong to the upper bucket: score 0.5 is mid, 0.8 is high.
    Time is fast below 0.75x the cohort median and slow above 1.5x.
    """
    if cohort_median_time <= 0:
        raise ValueError("cohort_median_time must be positive")
    score = features.latest_score
    if score is None or score < 0.5:
        score_bucket = ScoreBucket.LOW
    elif score < 0.8:
        score_bucket = ScoreBucket.MID
    else:
        score_bucket = ScoreBucket.HIGH

    if features.time_in_block < 0.75 * cohort_median_time:
        time_bucket = TimeBucket.FAST
    elif features.time_in_block > 1.5 * cohort_median_time:
        time_bucket = TimeBucket.SLOW
    else:
        time_bucket = TimeBucket.NORMAL

    if features.attempts <= 1:
        attempts_bucket = AttemptsBucket.FIRST
    elif features.attempts == 2:
        attempts_bucket = AttemptsBucket.RETRY
    else:
        attempts_bucket = AttemptsBucket.MANY

    return TutorState(
        score_bucket=score_bucket,
        time_bucket=time_bucket,
        emotion=features.emotion_mode,
        attempts_bucket=attempts_bucket,
    )
