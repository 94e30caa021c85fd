"""Deterministic Moore-machine interpreter for checked controller programs.

Per tick: the current state's guards are evaluated in source order against
the inputs and the elapsed counter; the first true guard fires (elapsed
resets to 0), otherwise the machine stays put and elapsed increments. The
tick's outputs come from the post-transition state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from ..errors import MissingInput
from .syntax import BoolLit, Compare, ELAPSED, Expr, FsmProgram, IntLit, Logic, Name, Not

COLORS = ("RED", "YELLOW", "GREEN")


@dataclass(frozen=True)
class Runtime:
    state: str
    elapsed: int


@dataclass(frozen=True)
class TraceRow:
    tick: int
    state: str
    ns: str
    ew: str
    elapsed: int
    inputs: dict[str, Any]


def eval_expr(expr: Expr, inputs: Mapping[str, Any], elapsed: int) -> Any:
    if isinstance(expr, IntLit):
        return expr.value
    if isinstance(expr, BoolLit):
        return expr.value
    if isinstance(expr, Name):
        if expr.ident == ELAPSED:
            return elapsed
        return inputs[expr.ident]
    if isinstance(expr, Compare):
        left = eval_expr(expr.left, inputs, elapsed)
        right = eval_expr(expr.right, inputs, elapsed)
        return {
            "==": left == right,
            "!=": left != right,
            "<": left < right,
            "<=": left <= right,
            ">": left > right,
            ">=": left >= right,
        }[expr.op]
    if isinstance(expr, Logic):
        if expr.op == "and":
            return eval_expr(expr.left, inputs, elapsed) and eval_expr(expr.right, inputs, elapsed)
        return eval_expr(expr.left, inputs, elapsed) or eval_expr(expr.right, inputs, elapsed)
    if isinstance(expr, Not):
        return not eval_expr(expr.operand, inputs, elapsed)
    raise TypeError(f"not an expression: {expr!r}")


def _require_inputs(program: FsmProgram, inputs: Mapping[str, Any], tick: int | None = None) -> None:
    for decl in program.inputs:
        if decl.name not in inputs:
            at = f" at tick {tick}" if tick is not None else ""
            raise MissingInput(f"input {decl.name!r} not assigned{at}")


def step(
    program: FsmProgram, runtime: Runtime, inputs: Mapping[str, Any]
) -> tuple[Runtime, dict[str, str]]:
    """One tick; returns the next runtime and the (Moore) outputs."""
    _require_inputs(program, inputs)
    current = program.state(runtime.state)
    nxt = Runtime(state=runtime.state, elapsed=runtime.elapsed + 1)
    for tr in current.transitions:
        if eval_expr(tr.guard, inputs, runtime.elapsed):
            nxt = Runtime(state=tr.target, elapsed=0)
            break
    outputs = program.state(nxt.state).output_map()
    return nxt, outputs


def simulate(
    program: FsmProgram, scenario: Mapping[int, Mapping[str, Any]], ticks: int
) -> list[TraceRow]:
    """Run T ticks from (initial, 0) under sparse per-tick input updates.

    Unspecified ticks inherit the previous assignment; tick 0 must fully
    assign every declared input.
    """
    initial = program.initial
    if initial is None:
        raise ValueError("program has no single initial state (run check first)")
    current_inputs: dict[str, Any] = {}
    runtime = Runtime(state=initial, elapsed=0)
    rows: list[TraceRow] = []
    for tick in range(ticks):
        if tick in scenario:
            current_inputs.update(scenario[tick])
        if tick == 0:
            _require_inputs(program, current_inputs, tick=0)
        runtime, outputs = step(program, runtime, current_inputs)
        rows.append(
            TraceRow(
                tick=tick,
                state=runtime.state,
                ns=outputs["ns"],
                ew=outputs["ew"],
                elapsed=runtime.elapsed,
                inputs=dict(current_inputs),
            )
        )
    return rows


def trace_to_csv(rows: list[TraceRow]) -> str:
    lines = ["tick,state,ns,ew,elapsed"]
    for row in rows:
        lines.append(f"{row.tick},{row.state},{row.ns},{row.ew},{row.elapsed}")
    return "\n".join(lines) + "\n"
