"""Recursive-descent parser.

Precedence, loosest to tightest: assignment, custom operators (any symbol run
plus identifiers used infix), comparisons, additive, multiplicative, postfix
(calls, field access, trailing blocks). Custom operators are a single
left-associative tier so arrow-like operators need no precedence table.

Errors are recoverable: the parser records a diagnostic, skips to the next
statement boundary, and keeps going, returning a partial program plus the
error list.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lexer import Token, TokenKind, tokenize
from .nodes import (
    Assign,
    BoolLit,
    Call,
    FieldAccess,
    FunctionLit,
    Ident,
    InfixCall,
    ListLit,
    Node,
    NullLit,
    NumberLit,
    Program,
    StringLit,
)
from .source import Span

CMP_OPS = frozenset({"<", ">", "<=", ">=", "==", "!="})
ADD_OPS = frozenset({"+", "-"})
MUL_OPS = frozenset({"*", "/"})

_EXPR_START_KINDS = frozenset(
    {
        TokenKind.NUMBER,
        TokenKind.STRING,
        TokenKind.BOOL,
        TokenKind.NULL,
        TokenKind.IDENT,
        TokenKind.LPAREN,
        TokenKind.LBRACKET,
        TokenKind.LBRACE,
    }
)


@dataclass(frozen=True, slots=True)
class ParseDiagnostic:
    span: Span
    message: str
    expected: tuple[str, ...] = ()


@dataclass(frozen=True)
class ParseResult:
    program: Program
    errors: tuple[ParseDiagnostic, ...]

    @property
    def ok(self) -> bool:
        return not self.errors


class _ParseFailure(Exception):
    def __init__(self, span: Span, message: str, expected: tuple[str, ...] = ()):
        super().__init__(message)
        self.span = span
        self.message = message
        self.expected = expected


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.errors: list[ParseDiagnostic] = []

    # token helpers

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != TokenKind.EOF:
            self.pos += 1
        return tok

    def at(self, kind: TokenKind, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def expect(self, kind: TokenKind, what: str) -> Token:
        if not self.at(kind):
            tok = self.peek()
            raise _ParseFailure(tok.span, f"expected {what}, found {tok.text or 'end of input'!r}", (what,))
        return self.advance()

    def skip_newlines(self) -> None:
        while self.at(TokenKind.NEWLINE):
            self.advance()

    # program / statements

    def parse_program(self, length_hint: int) -> Program:
        statements = self.parse_statements(until_rbrace=False)
        end = self.tokens[-1].span.end
        return Program(Span(0, max(end, length_hint)), tuple(statements))

    def parse_statements(self, until_rbrace: bool) -> list[Node]:
        statements: list[Node] = []
        while True:
            self.skip_newlines()
            if self.at(TokenKind.EOF):
                return statements
            if self.at(TokenKind.RBRACE):
                if until_rbrace:
                    return statements
                self.errors.append(ParseDiagnostic(self.peek().span, "unexpected '}'"))
                self.advance()
                continue
            try:
                stmt = self.parse_expression()
                statements.append(stmt)
                if not (
                    self.at(TokenKind.NEWLINE)
                    or self.at(TokenKind.EOF)
                    or (until_rbrace and self.at(TokenKind.RBRACE))
                ):
                    tok = self.peek()
                    raise _ParseFailure(
                        tok.span,
                        f"expected end of statement, found {tok.text!r}",
                        ("newline", ";"),
                    )
            except _ParseFailure as failure:
                self.errors.append(
                    ParseDiagnostic(failure.span, failure.message, failure.expected)
                )
                self.synchronize()

    def synchronize(self) -> None:
        """Skip to the next statement boundary; '}' is left for the caller."""
        while True:
            tok = self.peek()
            if tok.kind in (TokenKind.EOF, TokenKind.RBRACE):
                return
            self.advance()
            if tok.kind == TokenKind.NEWLINE:
                return

    # expressions

    def parse_expression(self) -> Node:
        left = self.parse_custom()
        if self.at(TokenKind.OP, "="):
            if not isinstance(left, (Ident, FieldAccess)):
                raise _ParseFailure(left.span, "invalid assignment target")
            self.advance()
            value = self.parse_expression()
            return Assign(Span(left.span.start, value.span.end), left, value)
        return left

    def parse_custom(self) -> Node:
        left = self.parse_comparison()
        while True:
            tok = self.peek()
            if tok.kind == TokenKind.OP and self._is_custom_op(tok.text):
                self.advance()
                right = self.parse_comparison()
                left = InfixCall(Span(left.span.start, right.span.end), tok.text, left, right)
            elif tok.kind == TokenKind.IDENT and self.peek(1).kind in _EXPR_START_KINDS:
                # declared identifier used infix, e.g. `A extends B`
                self.advance()
                right = self.parse_comparison()
                left = InfixCall(Span(left.span.start, right.span.end), tok.text, left, right)
            else:
                return left

    @staticmethod
    def _is_custom_op(text: str) -> bool:
        return text not in CMP_OPS and text not in ADD_OPS and text not in MUL_OPS and text not in ("=", ".")

    def parse_comparison(self) -> Node:
        left = self.parse_add()
        while self.peek().kind == TokenKind.OP and self.peek().text in CMP_OPS:
            op = self.advance().text
            right = self.parse_add()
            left = InfixCall(Span(left.span.start, right.span.end), op, left, right)
        return left

    def parse_add(self) -> Node:
        left = self.parse_mul()
        while self.peek().kind == TokenKind.OP and self.peek().text in ADD_OPS:
            op = self.advance().text
            right = self.parse_mul()
            left = InfixCall(Span(left.span.start, right.span.end), op, left, right)
        return left

    def parse_mul(self) -> Node:
        left = self.parse_postfix()
        while self.peek().kind == TokenKind.OP and self.peek().text in MUL_OPS:
            op = self.advance().text
            right = self.parse_postfix()
            left = InfixCall(Span(left.span.start, right.span.end), op, left, right)
        return left

    def parse_postfix(self) -> Node:
        node = self.parse_primary()
        while True:
            if self.at(TokenKind.LPAREN):
                node = self.parse_call(node)
            elif self.at(TokenKind.OP, "."):
                self.advance()
                name = self.expect(TokenKind.IDENT, "field name")
                node = FieldAccess(Span(node.span.start, name.span.end), node, name.text)
            elif self.at(TokenKind.LBRACE) and isinstance(node, (Call, Ident, FieldAccess)):
                block = self.parse_function_lit()
                if isinstance(node, Call):
                    node = Call(
                        Span(node.span.start, block.span.end), node.callee, node.args + (block,)
                    )
                else:
                    node = Call(Span(node.span.start, block.span.end), node, (block,))
            else:
                return node

    def parse_call(self, callee: Node) -> Call:
        self.expect(TokenKind.LPAREN, "'('")
        args: list[Node] = []
        if not self.at(TokenKind.RPAREN):
            while True:
                args.append(self.parse_argument())
                if self.at(TokenKind.COMMA):
                    self.advance()
                    continue
                break
        closer = self.expect(TokenKind.RPAREN, "')'")
        return Call(Span(callee.span.start, closer.span.end), callee, tuple(args))

    def parse_argument(self) -> Node:
        # `name = value` is a named argument, represented as an assignment
        if self.at(TokenKind.IDENT) and self.peek(1).kind == TokenKind.OP and self.peek(1).text == "=":
            name_tok = self.advance()
            self.advance()
            value = self.parse_expression()
            target = Ident(name_tok.span, name_tok.text)
            return Assign(Span(name_tok.span.start, value.span.end), target, value)
        return self.parse_expression()

    def parse_primary(self) -> Node:
        tok = self.peek()
        if tok.kind == TokenKind.NUMBER:
            self.advance()
            return NumberLit(tok.span, tok.value)
        if tok.kind == TokenKind.OP and tok.text == "-" and self.peek(1).kind == TokenKind.NUMBER:
            minus = self.advance()
            num = self.advance()
            return NumberLit(Span(minus.span.start, num.span.end), -num.value)
        if tok.kind == TokenKind.STRING:
            self.advance()
            return StringLit(tok.span, tok.value)
        if tok.kind == TokenKind.BOOL:
            self.advance()
            return BoolLit(tok.span, tok.value)
        if tok.kind == TokenKind.NULL:
            self.advance()
            return NullLit(tok.span)
        if tok.kind == TokenKind.IDENT:
            self.advance()
            return Ident(tok.span, tok.text)
        if tok.kind == TokenKind.LPAREN:
            self.advance()
            inner = self.parse_expression()
            self.expect(TokenKind.RPAREN, "')'")
            return inner
        if tok.kind == TokenKind.LBRACKET:
            return self.parse_list()
        if tok.kind == TokenKind.LBRACE:
            return self.parse_function_lit()
        raise _ParseFailure(
            tok.span, f"expected expression, found {tok.text or 'end of input'!r}", ("expression",)
        )

    def parse_list(self) -> ListLit:
        opener = self.expect(TokenKind.LBRACKET, "'['")
        items: list[Node] = []
        if not self.at(TokenKind.RBRACKET):
            while True:
                items.append(self.parse_expression())
                if self.at(TokenKind.COMMA):
                    self.advance()
                    continue
                break
        closer = self.expect(TokenKind.RBRACKET, "']'")
        return ListLit(Span(opener.span.start, closer.span.end), tuple(items))

    def parse_function_lit(self) -> FunctionLit:
        opener = self.expect(TokenKind.LBRACE, "'{'")
        params = self._try_parse_params()
        body = self.parse_statements(until_rbrace=True)
        closer = self.expect(TokenKind.RBRACE, "'}'")
        return FunctionLit(Span(opener.span.start, closer.span.end), params, tuple(body))

    def _try_parse_params(self) -> tuple[str, ...] | None:
        """Lookahead for ``(a, b) ->`` right after the opening brace."""
        if not self.at(TokenKind.LPAREN):
            return None
        i = self.pos + 1
        names: list[str] = []
        while self.tokens[i].kind == TokenKind.IDENT:
            names.append(self.tokens[i].text)
            i += 1
            if self.tokens[i].kind == TokenKind.COMMA:
                i += 1
            else:
                break
        if self.tokens[i].kind != TokenKind.RPAREN:
            return None
        i += 1
        tok = self.tokens[i]
        if tok.kind == TokenKind.OP and tok.text == "->":
            self.pos = i + 1
            return tuple(names)
        return None


def parse(tokens: list[Token], length_hint: int = 0) -> ParseResult:
    """Parse a token stream into a Program plus recoverable errors."""
    parser = _Parser(tokens)
    program = parser.parse_program(length_hint)
    return ParseResult(program, tuple(parser.errors))


def parse_text(text: str) -> ParseResult:
    """Tokenize and parse. Raises LexError for unlexable input."""
    return parse(tokenize(text), len(text))
