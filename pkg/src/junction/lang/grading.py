"""Rubric-based autograding of controller programs.

A rubric is a declarative document of weighted behavioral checks evaluated
over simulated scenarios. The grade is the weight share of passing checks,
so removing a failing check can only raise the score.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from ..errors import MalformedDocument, MissingInput
from .checker import check
from .diagnostics import ERROR
from .machine import TraceRow, simulate
from .syntax import FsmProgram, SIGNALS

GREEN = "GREEN"
YELLOW = "YELLOW"
RED = "RED"

_ALLOWED_CYCLE = {(GREEN, YELLOW), (YELLOW, RED), (RED, GREEN)}

DEFAULT_CONSTANTS = {
    "yellow_min": 2,
    "yellow_max": 6,
    "sensor_response_ticks": 20,
    "sensor_input": "car_ew",
}


@dataclass(frozen=True)
class Scenario:
    name: str
    ticks: int
    updates: dict[int, dict[str, Any]]


@dataclass(frozen=True)
class RubricCheck:
    id: str
    weight: float


@dataclass(frozen=True)
class Rubric:
    rubric_id: str
    checks: tuple[RubricCheck, ...]
    constants: dict[str, Any]
    scenarios: tuple[Scenario, ...]


@dataclass(frozen=True)
class Violation:
    check: str
    message: str
    scenario: str | None = None
    tick: int | None = None
    state: str | None = None


def _check_safety(traces: dict[str, list[TraceRow]], constants: dict[str, Any]) -> list[Violation]:
    """No tick may show both directions GREEN, or GREEN against YELLOW."""
    violations = []
    for name, rows in traces.items():
        bad = [
            row
            for row in rows
            if (row.ns == GREEN and row.ew in (GREEN, YELLOW)) or (row.ew == GREEN and row.ns in (GREEN, YELLOW))
        ]
        if bad:
            first = bad[0]
            violations.append(
                Violation(
                    check="safety",
                    scenario=name,
                    tick=first.tick,
                    state=first.state,
                    message=(
                        f"conflicting signals ns={first.ns}, ew={first.ew} in state {first.state!r} "
                        f"at tick {first.tick} ({len(bad)} tick(s) total)"
                    ),
                )
            )
    return violations


def _check_cycle_order(traces: dict[str, list[TraceRow]], constants: dict[str, Any]) -> list[Violation]:
    """Each direction must change color only GREEN->YELLOW->RED->GREEN."""
    violations = []
    for signal in SIGNALS:
        for name, rows in traces.items():
            for prev, row in zip(rows, rows[1:]):
                before, after = getattr(prev, signal), getattr(row, signal)
                if before != after and (before, after) not in _ALLOWED_CYCLE:
                    violations.append(
                        Violation(
                            check="cycle_order",
                            scenario=name,
                            tick=row.tick,
                            state=row.state,
                            message=f"{signal} changed {before}->{after} at tick {row.tick} (state {row.state!r})",
                        )
                    )
                    break
        if not any(getattr(row, signal) == GREEN for rows in traces.values() for row in rows):
            violations.append(
                Violation(
                    check="cycle_order",
                    message=f"{signal} never turns GREEN in any scenario",
                )
            )
    return violations


def _yellow_runs(rows: list[TraceRow], signal: str) -> list[tuple[int, int, bool]]:
    """(start tick, length, runs_into_trace_end) for maximal YELLOW runs."""
    runs = []
    start = None
    for row in rows:
        if getattr(row, signal) == YELLOW:
            if start is None:
                start = row.tick
        elif start is not None:
            runs.append((start, row.tick - start, False))
            start = None
    if start is not None:
        runs.append((start, rows[-1].tick - start + 1, True))
    return runs


def _check_yellow_dwell(traces: dict[str, list[TraceRow]], constants: dict[str, Any]) -> list[Violation]:
    lo = int(constants["yellow_min"])
    hi = int(constants["yellow_max"])
    violations = []
    for name, rows in traces.items():
        for signal in SIGNALS:
            for start, length, unfinished in _yellow_runs(rows, signal):
                if length > hi:
                    violations.append(
                        Violation(
                            check="yellow_dwell",
                            scenario=name,
                            tick=start,
                            message=f"{signal} held YELLOW for {length} ticks from tick {start} (max {hi})",
                        )
                    )
                elif not unfinished and length < lo:
                    violations.append(
                        Violation(
                            check="yellow_dwell",
                            scenario=name,
                            tick=start,
                            message=f"{signal} held YELLOW for only {length} tick(s) from tick {start} (min {lo})",
                        )
                    )
    return violations


def _check_sensor_response(traces: dict[str, list[TraceRow]], constants: dict[str, Any]) -> list[Violation]:
    """EW must go GREEN within K ticks of its sensor being continuously true."""
    k = int(constants["sensor_response_ticks"])
    sensor = constants["sensor_input"]
    violations = []
    for name, rows in traces.items():
        waiting = 0
        for row in rows:
            if row.inputs.get(sensor) and row.ew != GREEN:
                waiting += 1
                if waiting > k:
                    violations.append(
                        Violation(
                            check="sensor_response",
                            scenario=name,
                            tick=row.tick,
                            state=row.state,
                            message=(
                                f"{sensor} held true for {waiting} ticks without an ew GREEN "
                                f"by tick {row.tick} (limit {k})"
                            ),
                        )
                    )
                    break
            else:
                waiting = 0
    return violations


_CHECKERS = {
    "safety": _check_safety,
    "cycle_order": _check_cycle_order,
    "yellow_dwell": _check_yellow_dwell,
    "sensor_response": _check_sensor_response,
}


def load_rubric(text: str) -> Rubric:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise MalformedDocument(f"not a valid rubric document: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedDocument("rubric document is empty or not a mapping")
    try:
        checks = tuple(RubricCheck(id=c["id"], weight=float(c["weight"])) for c in doc["checks"])
        scenarios = tuple(
            Scenario(
                name=s["name"],
                ticks=int(s["ticks"]),
                updates={int(u["tick"]): dict(u["values"]) for u in s.get("inputs", [])},
            )
            for s in doc["scenarios"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocument(f"rubric schema error: {exc}") from exc
    for c in checks:
        if c.id not in _CHECKERS:
            raise MalformedDocument(f"unknown rubric check {c.id!r}")
        if c.weight <= 0:
            raise MalformedDocument(f"check {c.id!r} must have positive weight")
    if not scenarios:
        raise MalformedDocument("rubric needs at least one scenario")
    constants = dict(DEFAULT_CONSTANTS)
    constants.update(doc.get("constants", {}))
    return Rubric(
        rubric_id=str(doc.get("rubric_id", "rubric")),
        checks=checks,
        constants=constants,
        scenarios=scenarios,
    )


def load_rubric_path(path: str | Path) -> Rubric:
    return load_rubric(Path(path).read_text(encoding="utf-8"))


def grade(program: FsmProgram, rubric: Rubric) -> tuple[float, list[Violation]]:
    """Weighted share of passing checks, with the violations found.

    Programs that fail the static checker score 0.0; the diagnostics come
    back as 'static' violations.
    """
    errors = [d for d in check(program) if d.severity == ERROR]
    if errors:
        return 0.0, [Violation(check="static", message=str(d)) for d in errors]

    traces: dict[str, list[TraceRow]] = {}
    for scenario in rubric.scenarios:
        try:
            traces[scenario.name] = simulate(program, scenario.updates, scenario.ticks)
        except MissingInput as exc:
            return 0.0, [Violation(check="interface", scenario=scenario.name, message=str(exc))]

    violations: list[Violation] = []
    for rubric_check in rubric.checks:
        violations.extend(_CHECKERS[rubric_check.id](traces, rubric.constants))

    failed = {v.check for v in violations}
    total = sum(c.weight for c in rubric.checks)
    passed = sum(c.weight for c in rubric.checks if c.id not in failed)
    return (passed / total if total else 0.0), violations
