"""Tokenizer for the controller language."""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import ERROR, Diagnostic

KEYWORDS = frozenset(
    {"controller", "input", "state", "initial", "set", "when", "bool", "int", "true", "false", "and", "or", "not"}
)

# Two-character symbols first so maximal munch wins.
_SYMBOLS = ("->", "==", "!=", "<=", ">=", "{", "}", "(", ")", ":", ";", "=", "<", ">")

EOF = "eof"
IDENT = "ident"
INT = "int_lit"


@dataclass(frozen=True)
class Token:
    kind: str  # keyword text, symbol text, IDENT, INT or EOF
    text: str
    line: int
    column: int


def tokenize(source: str) -> tuple[list[Token], Diagnostic | None]:
    """Scan source into tokens; on a bad character return a diagnostic."""
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                advance(1)
            continue
        if ch.isdecimal():
            start_line, start_col = line, col
            j = i
            while j < n and source[j].isdecimal():
                j += 1
            text = source[i:j]
            advance(j - i)
            tokens.append(Token(INT, text, start_line, start_col))
            continue
        if ch.isalpha() or ch == "_":
            start_line, start_col = line, col
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            advance(j - i)
            kind = text if text in KEYWORDS else IDENT
            tokens.append(Token(kind, text, start_line, start_col))
            continue
        matched = False
        for sym in _SYMBOLS:
            if source.startswith(sym, i):
                tokens.append(Token(sym, sym, line, col))
                advance(len(sym))
                matched = True
                break
        if matched:
            continue
        return tokens, Diagnostic(ERROR, line, col, f"unexpected character {ch!r}")

    tokens.append(Token(EOF, "", line, col))
    return tokens, None
