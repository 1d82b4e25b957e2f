"""Tokenizer for the diagram scripting language.

Statement separators are newlines and ``;``. Newlines are suppressed inside
parentheses and brackets but kept inside braces, since brace blocks contain
statements of their own. ``//`` comments run to end of line.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto

from .source import Span


class LexError(Exception):
    def __init__(self, span: Span, message: str):
        super().__init__(message)
        self.span = span
        self.message = message


class TokenKind(Enum):
    NUMBER = auto()
    STRING = auto()
    BOOL = auto()
    NULL = auto()
    IDENT = auto()
    OP = auto()  # any run of operator characters, including "="
    LPAREN = auto()
    RPAREN = auto()
    LBRACKET = auto()
    RBRACKET = auto()
    LBRACE = auto()
    RBRACE = auto()
    COMMA = auto()
    NEWLINE = auto()  # statement separator: newline or ";"
    EOF = auto()


@dataclass(frozen=True, slots=True)
class Token:
    kind: TokenKind
    text: str
    span: Span
    value: object = None


OPERATOR_CHARS = frozenset("+-*/%<>=!&|#?~.")

_IDENT_START = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_REST = _IDENT_START | frozenset("0123456789")
_DIGITS = frozenset("0123456789")

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n"}

_KEYWORD_VALUES = {"true": True, "false": False, "null": None}


def tokenize(text: str) -> list[Token]:
    """Token stream covering all non-whitespace, non-comment input.

    Raises LexError on unterminated strings, bad escapes, and characters
    outside the grammar.
    """
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    # bracket stack entries: True = newlines kept, False = suppressed
    keep_newlines = [True]

    def push(kind: TokenKind, start: int, end: int, value: object = None) -> None:
        tokens.append(Token(kind, text[start:end], Span(start, end), value))

    while pos < n:
        ch = text[pos]

        if ch in " \t\r":
            pos += 1
            continue

        if ch == "\n" or ch == ";":
            if keep_newlines[-1]:
                # collapse runs of separators into one token
                if not tokens or tokens[-1].kind != TokenKind.NEWLINE:
                    push(TokenKind.NEWLINE, pos, pos + 1)
            pos += 1
            continue

        if ch == "/" and text.startswith("//", pos):
            while pos < n and text[pos] != "\n":
                pos += 1
            continue

        if ch in _DIGITS:
            start = pos
            while pos < n and text[pos] in _DIGITS:
                pos += 1
            if pos + 1 < n and text[pos] == "." and text[pos + 1] in _DIGITS:
                pos += 1
                while pos < n and text[pos] in _DIGITS:
                    pos += 1
            if pos < n and text[pos] in "eE":
                mark = pos
                pos += 1
                if pos < n and text[pos] in "+-":
                    pos += 1
                if pos < n and text[pos] in _DIGITS:
                    while pos < n and text[pos] in _DIGITS:
                        pos += 1
                else:
                    pos = mark  # not an exponent after all
            push(TokenKind.NUMBER, start, pos, float(text[start:pos]))
            continue

        if ch in _IDENT_START:
            start = pos
            while pos < n and text[pos] in _IDENT_REST:
                pos += 1
            word = text[start:pos]
            if word in _KEYWORD_VALUES:
                kind = TokenKind.NULL if word == "null" else TokenKind.BOOL
                push(kind, start, pos, _KEYWORD_VALUES[word])
            else:
                push(TokenKind.IDENT, start, pos, word)
            continue

        if ch == '"':
            start = pos
            pos += 1
            parts: list[str] = []
            while True:
                if pos >= n or text[pos] == "\n":
                    raise LexError(Span(start, pos), "unterminated string literal")
                c = text[pos]
                if c == '"':
                    pos += 1
                    break
                if c == "\\":
                    if pos + 1 >= n:
                        raise LexError(Span(start, pos + 1), "unterminated string literal")
                    esc = text[pos + 1]
                    if esc not in _ESCAPES:
                        raise LexError(Span(pos, pos + 2), f"unknown escape '\\{esc}'")
                    parts.append(_ESCAPES[esc])
                    pos += 2
                    continue
                parts.append(c)
                pos += 1
            push(TokenKind.STRING, start, pos, "".join(parts))
            continue

        if ch == "(":
            push(TokenKind.LPAREN, pos, pos + 1)
            keep_newlines.append(False)
            pos += 1
            continue
        if ch == "[":
            push(TokenKind.LBRACKET, pos, pos + 1)
            keep_newlines.append(False)
            pos += 1
            continue
        if ch == "{":
            push(TokenKind.LBRACE, pos, pos + 1)
            keep_newlines.append(True)
            pos += 1
            continue
        if ch in ")]}":
            kind = {")": TokenKind.RPAREN, "]": TokenKind.RBRACKET, "}": TokenKind.RBRACE}[ch]
            push(kind, pos, pos + 1)
            if len(keep_newlines) > 1:
                keep_newlines.pop()
            pos += 1
            continue
        if ch == ",":
            push(TokenKind.COMMA, pos, pos + 1)
            pos += 1
            continue

        if ch in OPERATOR_CHARS:
            start = pos
            # a "//" anywhere ends the run: it opens a comment
            while pos < n and text[pos] in OPERATOR_CHARS and not text.startswith("//", pos):
                pos += 1
            push(TokenKind.OP, start, pos)
            continue

        raise LexError(Span(pos, pos + 1), f"illegal character {ch!r}")

    # trailing separator so the parser sees a statement boundary at EOF
    if tokens and tokens[-1].kind != TokenKind.NEWLINE:
        push(TokenKind.NEWLINE, n, n)
    tokens.append(Token(TokenKind.EOF, "", Span(n, n)))
    return tokens
