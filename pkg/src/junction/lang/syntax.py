"""AST for the controller language, plus the canonical pretty-printer.

Source positions ride along on every node but are excluded from equality,
so parse(pretty(ast)) == ast is the round-trip identity the tests lean on.

Grammar (EBNF):

    program    := "controller" IDENT "{" input* state+ "}"
    input      := "input" IDENT ":" ("bool" | "int") ";"
    state      := ["initial"] "state" IDENT "{" output* transition* "}"
    output     := "set" ("ns" | "ew") "=" ("RED" | "YELLOW" | "GREEN") ";"
    transition := "when" expr "->" IDENT ";"

    expr       := or_expr
    or_expr    := and_expr ("or" and_expr)*
    and_expr   := not_expr ("and" not_expr)*
    not_expr   := "not" not_expr | comparison
    comparison := primary (("==" | "!=" | "<" | "<=" | ">" | ">=") primary)?
    primary    := IDENT | INT | "true" | "false" | "(" expr ")"

`elapsed` is a built-in int identifier counting ticks spent in the current
state. Line comments start with //.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

SIGNALS = ("ns", "ew")
COLOR_NAMES = ("RED", "YELLOW", "GREEN")
ELAPSED = "elapsed"


@dataclass(frozen=True)
class Name:
    ident: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class IntLit:
    value: int
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BoolLit:
    value: bool
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Compare:
    op: str  # ==, !=, <, <=, >, >=
    left: "Expr"
    right: "Expr"
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Logic:
    op: str  # and, or
    left: "Expr"
    right: "Expr"
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Not:
    operand: "Expr"
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


Expr = Union[Name, IntLit, BoolLit, Compare, Logic, Not]


@dataclass(frozen=True)
class InputDecl:
    name: str
    type: str  # "bool" | "int"
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Output:
    signal: str  # "ns" | "ew"
    color: str  # "RED" | "YELLOW" | "GREEN"
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Transition:
    guard: Expr
    target: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class StateDef:
    name: str
    initial: bool
    outputs: tuple[Output, ...]
    transitions: tuple[Transition, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def output_map(self) -> dict[str, str]:
        """Signal colors for this state; unassigned signals default to RED."""
        colors = {signal: "RED" for signal in SIGNALS}
        for out in self.outputs:
            colors[out.signal] = out.color
        return colors


@dataclass(frozen=True)
class FsmProgram:
    name: str
    inputs: tuple[InputDecl, ...]
    states: tuple[StateDef, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    @property
    def initial(self) -> str | None:
        """Name of the single initial state, or None if 0 or several."""
        marked = [s.name for s in self.states if s.initial]
        return marked[0] if len(marked) == 1 else None

    def state(self, name: str) -> StateDef:
        for s in self.states:
            if s.name == name:
                return s
        raise KeyError(name)


# Precedence levels used by both the parser and the printer.
_PREC_OR = 1
_PREC_AND = 2
_PREC_NOT = 3
_PREC_CMP = 4
_PREC_ATOM = 5


def _prec(expr: Expr) -> int:
    if isinstance(expr, Logic):
        return _PREC_OR if expr.op == "or" else _PREC_AND
    if isinstance(expr, Not):
        return _PREC_NOT
    if isinstance(expr, Compare):
        return _PREC_CMP
    return _PREC_ATOM


def format_expr(expr: Expr, min_prec: int = _PREC_OR) -> str:
    if isinstance(expr, Name):
        text = expr.ident
    elif isinstance(expr, IntLit):
        text = str(expr.value)
    elif isinstance(expr, BoolLit):
        text = "true" if expr.value else "false"
    elif isinstance(expr, Not):
        text = "not " + format_expr(expr.operand, _PREC_NOT)
    elif isinstance(expr, Compare):
        text = f"{format_expr(expr.left, _PREC_ATOM)} {expr.op} {format_expr(expr.right, _PREC_ATOM)}"
    elif isinstance(expr, Logic):
        own = _prec(expr)
        # Left-associative: the right operand needs strictly tighter binding.
        text = f"{format_expr(expr.left, own)} {expr.op} {format_expr(expr.right, own + 1)}"
    else:
        raise TypeError(f"not an expression: {expr!r}")
    if _prec(expr) < min_prec:
        return f"({text})"
    return text


def pretty(program: FsmProgram) -> str:
    """Canonical source text for a program; reparses to an equal AST."""
    lines = [f"controller {program.name} {{"]
    for inp in program.inputs:
        lines.append(f"  input {inp.name}: {inp.type};")
    if program.inputs:
        lines.append("")
    for i, state in enumerate(program.states):
        if i:
            lines.append("")
        prefix = "initial " if state.initial else ""
        lines.append(f"  {prefix}state {state.name} {{")
        for out in state.outputs:
            lines.append(f"    set {out.signal} = {out.color};")
        for tr in state.transitions:
            lines.append(f"    when {format_expr(tr.guard)} -> {tr.target};")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
