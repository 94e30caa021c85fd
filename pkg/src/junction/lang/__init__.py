"""Traffic-light controller language: parser, checker, simulator, grader."""

from .diagnostics import Diagnostic
from .syntax import (
    Compare,
    FsmProgram,
    InputDecl,
    IntLit,
    BoolLit,
    Logic,
    Name,
    Not,
    Output,
    StateDef,
    Transition,
    pretty,
)
from .parser import ParseResult, parse
from .checker import check
from .machine import COLORS, Runtime, TraceRow, eval_expr, simulate, step, trace_to_csv
from .grading import Rubric, Scenario, Violation, grade, load_rubric, load_rubric_path

__all__ = [
    "Diagnostic",
    "FsmProgram",
    "InputDecl",
    "StateDef",
    "Output",
    "Transition",
    "Name",
    "IntLit",
    "BoolLit",
    "Compare",
    "Logic",
    "Not",
    "pretty",
    "ParseResult",
    "parse",
    "check",
    "COLORS",
    "Runtime",
    "TraceRow",
    "eval_expr",
    "step",
    "simulate",
    "trace_to_csv",
    "Rubric",
    "Scenario",
    "Violation",
    "grade",
    "load_rubric",
    "load_rubric_path",
]
