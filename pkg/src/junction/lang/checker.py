"""Static checks on parsed controller programs.

Errors: missing or duplicate initial state, duplicate state names, unknown
transition targets, duplicate signal assignment, unknown identifiers and
type errors inside guards. Warnings: unreachable states and states with no
outgoing transitions.
"""

from __future__ import annotations

from .diagnostics import ERROR, WARNING, Diagnostic
from .syntax import (
    BoolLit,
    Compare,
    ELAPSED,
    Expr,
    FsmProgram,
    IntLit,
    Logic,
    Name,
    Not,
)

_BOOL = "bool"
_INT = "int"


def _type_of(expr: Expr, env: dict[str, str], out: list[Diagnostic]) -> str | None:
    """Type of an expression, or None once an error was reported for it."""
    if isinstance(expr, IntLit):
        return _INT
    if isinstance(expr, BoolLit):
        return _BOOL
    if isinstance(expr, Name):
        if expr.ident == ELAPSED:
            return _INT
        if expr.ident not in env:
            out.append(Diagnostic(ERROR, expr.line, expr.column, f"unknown identifier {expr.ident!r}"))
            return None
        return env[expr.ident]
    if isinstance(expr, Compare):
        left = _type_of(expr.left, env, out)
        right = _type_of(expr.right, env, out)
        ok = True
        if left is not None and left != _INT:
            out.append(Diagnostic(ERROR, expr.line, expr.column, f"left operand of {expr.op!r} must be int, got {left}"))
            ok = False
        if right is not None and right != _INT:
            out.append(Diagnostic(ERROR, expr.line, expr.column, f"right operand of {expr.op!r} must be int, got {right}"))
            ok = False
        return _BOOL if ok else None
    if isinstance(expr, Logic):
        for side, sub in (("left", expr.left), ("right", expr.right)):
            t = _type_of(sub, env, out)
            if t is not None and t != _BOOL:
                out.append(
                    Diagnostic(ERROR, expr.line, expr.column, f"{side} operand of {expr.op!r} must be bool, got {t}")
                )
        return _BOOL
    if isinstance(expr, Not):
        t = _type_of(expr.operand, env, out)
        if t is not None and t != _BOOL:
            out.append(Diagnostic(ERROR, expr.line, expr.column, f"operand of 'not' must be bool, got {t}"))
        return _BOOL
    raise TypeError(f"not an expression: {expr!r}")


def check(program: FsmProgram) -> list[Diagnostic]:
    """Run all static checks; total, never raises on a parsed program."""
    out: list[Diagnostic] = []

    env: dict[str, str] = {}
    for inp in program.inputs:
        if inp.name == ELAPSED:
            out.append(Diagnostic(ERROR, inp.line, inp.column, f"input name {ELAPSED!r} shadows the built-in counter"))
            continue
        if inp.name in env:
            out.append(Diagnostic(ERROR, inp.line, inp.column, f"duplicate input {inp.name!r}"))
            continue
        env[inp.name] = inp.type

    state_names: set[str] = set()
    for state in program.states:
        if state.name in state_names:
            out.append(Diagnostic(ERROR, state.line, state.column, f"duplicate state name {state.name!r}"))
        state_names.add(state.name)

    initial_states = [s for s in program.states if s.initial]
    if not initial_states:
        out.append(
            Diagnostic(ERROR, program.line, program.column, "no initial state: mark one state with 'initial'")
        )
    for extra in initial_states[1:]:
        out.append(
            Diagnostic(
                ERROR, extra.line, extra.column,
                f"duplicate initial state {extra.name!r} (already have {initial_states[0].name!r})",
            )
        )

    for state in program.states:
        assigned: set[str] = set()
        for output in state.outputs:
            if output.signal in assigned:
                out.append(
                    Diagnostic(
                        ERROR, output.line, output.column,
                        f"signal {output.signal!r} assigned more than once in state {state.name!r}",
                    )
                )
            assigned.add(output.signal)
        for tr in state.transitions:
            if tr.target not in state_names:
                out.append(Diagnostic(ERROR, tr.line, tr.column, f"transition to unknown state {tr.target!r}"))
            t = _type_of(tr.guard, env, out)
            if t is not None and t != _BOOL:
                out.append(Diagnostic(ERROR, tr.line, tr.column, f"guard must be bool, got {t}"))

    # Reachability from the initial state, if there is exactly one.
    if len(initial_states) == 1:
        reachable = {initial_states[0].name}
        frontier = [initial_states[0].name]
        by_name = {s.name: s for s in program.states}
        while frontier:
            current = by_name.get(frontier.pop())
            if current is None:
                continue
            for tr in current.transitions:
                if tr.target in by_name and tr.target not in reachable:
                    reachable.add(tr.target)
                    frontier.append(tr.target)
        for state in program.states:
            if state.name not in reachable:
                out.append(
                    Diagnostic(WARNING, state.line, state.column, f"state {state.name!r} is unreachable from the initial state")
                )

    for state in program.states:
        if not state.transitions:
            out.append(
                Diagnostic(WARNING, state.line, state.column, f"state {state.name!r} has no outgoing transitions")
            )

    return out
