"""Recursive-descent parser for the controller language.

parse() never raises on any input: it returns either a program or error
diagnostics with line/column positions, and nothing else.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import ERROR, Diagnostic
from .lexer import EOF, IDENT, INT, Token, tokenize
from .syntax import (
    BoolLit,
    COLOR_NAMES,
    Compare,
    Expr,
    FsmProgram,
    InputDecl,
    IntLit,
    Logic,
    Name,
    Not,
    Output,
    SIGNALS,
    StateDef,
    Transition,
)

_CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class ParseResult:
    program: FsmProgram | None
    diagnostics: tuple[Diagnostic, ...]

    @property
    def ok(self) -> bool:
        return self.program is not None


class _ParseError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def error(self, tok: Token, message: str, expected: tuple[str, ...] = ()) -> _ParseError:
        return _ParseError(Diagnostic(ERROR, tok.line, tok.column, message, expected))

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            shown = what or f"'{kind}'"
            found = "end of input" if tok.kind == EOF else f"{tok.text!r}"
            raise self.error(tok, f"expected {shown}, found {found}", expected=(kind,))
        return self.next()

    def expect_ident(self, what: str) -> Token:
        tok = self.peek()
        if tok.kind != IDENT:
            found = "end of input" if tok.kind == EOF else f"{tok.text!r}"
            raise self.error(tok, f"expected {what}, found {found}", expected=(IDENT,))
        return self.next()

    def parse_program(self) -> FsmProgram:
        kw = self.expect("controller")
        name = self.expect_ident("controller name")
        self.expect("{")

        inputs: list[InputDecl] = []
        while self.peek().kind == "input":
            inputs.append(self.parse_input())

        states: list[StateDef] = []
        while self.peek().kind in ("initial", "state"):
            states.append(self.parse_state())
        if not states:
            tok = self.peek()
            raise self.error(
                tok,
                "expected at least one state declaration",
                expected=("initial", "state"),
            )

        self.expect("}")
        tail = self.peek()
        if tail.kind != EOF:
            raise self.error(tail, f"unexpected input after controller body: {tail.text!r}", expected=(EOF,))
        return FsmProgram(
            name=name.text,
            inputs=tuple(inputs),
            states=tuple(states),
            line=kw.line,
            column=kw.column,
        )

    def parse_input(self) -> InputDecl:
        kw = self.expect("input")
        name = self.expect_ident("input name")
        self.expect(":")
        tok = self.peek()
        if tok.kind not in ("bool", "int"):
            raise self.error(tok, f"expected 'bool' or 'int', found {tok.text!r}", expected=("bool", "int"))
        self.next()
        self.expect(";")
        return InputDecl(name=name.text, type=tok.text, line=kw.line, column=kw.column)

    def parse_state(self) -> StateDef:
        first = self.peek()
        initial = False
        if first.kind == "initial":
            initial = True
            self.next()
        self.expect("state")
        name = self.expect_ident("state name")
        self.expect("{")

        outputs: list[Output] = []
        while self.peek().kind == "set":
            outputs.append(self.parse_output())
        transitions: list[Transition] = []
        while self.peek().kind == "when":
            transitions.append(self.parse_transition())

        self.expect("}")
        return StateDef(
            name=name.text,
            initial=initial,
            outputs=tuple(outputs),
            transitions=tuple(transitions),
            line=first.line,
            column=first.column,
        )

    def parse_output(self) -> Output:
        kw = self.expect("set")
        signal = self.expect_ident("signal name ('ns' or 'ew')")
        if signal.text not in SIGNALS:
            raise _ParseError(
                Diagnostic(ERROR, signal.line, signal.column, f"unknown signal {signal.text!r}", expected=SIGNALS)
            )
        self.expect("=")
        color = self.expect_ident("a color (RED, YELLOW or GREEN)")
        if color.text not in COLOR_NAMES:
            raise _ParseError(
                Diagnostic(ERROR, color.line, color.column, f"unknown color {color.text!r}", expected=COLOR_NAMES)
            )
        self.expect(";")
        return Output(signal=signal.text, color=color.text, line=kw.line, column=kw.column)

    def parse_transition(self) -> Transition:
        kw = self.expect("when")
        guard = self.parse_expr()
        self.expect("->")
        target = self.expect_ident("target state name")
        self.expect(";")
        return Transition(guard=guard, target=target.text, line=kw.line, column=kw.column)

    def parse_expr(self) -> Expr:
        return self.parse_or()

    def parse_or(self) -> Expr:
        left = self.parse_and()
        while self.peek().kind == "or":
            op = self.next()
            right = self.parse_and()
            left = Logic(op="or", left=left, right=right, line=op.line, column=op.column)
        return left

    def parse_and(self) -> Expr:
        left = self.parse_not()
        while self.peek().kind == "and":
            op = self.next()
            right = self.parse_not()
            left = Logic(op="and", left=left, right=right, line=op.line, column=op.column)
        return left

    def parse_not(self) -> Expr:
        tok = self.peek()
        if tok.kind == "not":
            self.next()
            return Not(operand=self.parse_not(), line=tok.line, column=tok.column)
        return self.parse_comparison()

    def parse_comparison(self) -> Expr:
        left = self.parse_primary()
        tok = self.peek()
        if tok.kind in _CMP_OPS:
            self.next()
            right = self.parse_primary()
            return Compare(op=tok.kind, left=left, right=right, line=tok.line, column=tok.column)
        return left

    def parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == INT:
            self.next()
            return IntLit(value=int(tok.text), line=tok.line, column=tok.column)
        if tok.kind in ("true", "false"):
            self.next()
            return BoolLit(value=tok.kind == "true", line=tok.line, column=tok.column)
        if tok.kind == IDENT:
            self.next()
            return Name(ident=tok.text, line=tok.line, column=tok.column)
        if tok.kind == "(":
            self.next()
            expr = self.parse_expr()
            self.expect(")")
            return expr
        found = "end of input" if tok.kind == EOF else f"{tok.text!r}"
        raise self.error(tok, f"expected an expression, found {found}", expected=(IDENT, INT, "true", "false", "("))


def parse(source: str) -> ParseResult:
    """Parse source text; returns a program or error diagnostics, never both."""
    tokens, lex_error = tokenize(source)
    if lex_error is not None:
        return ParseResult(program=None, diagnostics=(lex_error,))
    parser = _Parser(tokens)
    try:
        program = parser.parse_program()
    except _ParseError as exc:
        return ParseResult(program=None, diagnostics=(exc.diagnostic,))
    except RecursionError:
        tok = parser.peek()
        return ParseResult(
            program=None,
            diagnostics=(Diagnostic(ERROR, tok.line, tok.column, "expression nests too deeply"),),
        )
    return ParseResult(program=program, diagnostics=())
