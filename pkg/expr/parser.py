"""
Tokenizer and recursive-descent parser for scalar expressions.

Grammar (whitespace insignificant, no implicit multiplication):

    expression := term (("+" | "-") term)*
    term       := unary (("*" | "/") unary)*
    unary      := "-" unary | power
    power      := primary ("^" unary)?
    primary    := number | variable | constant | function "(" expression ")"
                | "(" expression ")"

`^` binds tighter than unary minus and is right associative, so
"-x^2" is -(x^2) and "2^3^2" is 2^(3^2).
"""

import re
from dataclasses import dataclass

from expr.nodes import (
    CONSTANTS,
    FUNCTIONS,
    VARIABLES,
    Binary,
    Call,
    Const,
    Expr,
    Neg,
    Number,
    Var,
)


class ExprSyntaxError(ValueError):
    def __init__(self, position: int, expected: str, source: str = ""):
        self.position = position
        self.expected = expected
        super().__init__(f"syntax error at position {position}: expected {expected} in {source!r}")


class UnknownIdentifier(ValueError):
    def __init__(self, name: str, position: int):
        self.name = name
        self.position = position
        super().__init__(f"unknown identifier {name!r} at position {position}")


@dataclass(frozen=True)
class Token:
    kind: str  # "number" | "ident" | "op" | "eof"
    text: str
    position: int


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            raise ExprSyntaxError(pos, "a number, identifier or operator", source)
        kind = match.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, match.group(), pos))
        pos = match.end()
    tokens.append(Token("eof", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def accept(self, *ops: str) -> Token | None:
        if self.current.kind == "op" and self.current.text in ops:
            return self.advance()
        return None

    def expect(self, op: str) -> Token:
        token = self.accept(op)
        if token is None:
            raise ExprSyntaxError(self.current.position, repr(op), self.source)
        return token

    def parse(self) -> Expr:
        node = self.expression()
        if self.current.kind != "eof":
            raise ExprSyntaxError(self.current.position, "an operator or end of input", self.source)
        return node

    def expression(self) -> Expr:
        node = self.term()
        while (op := self.accept("+", "-")) is not None:
            node = Binary(op.text, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while (op := self.accept("*", "/")) is not None:
            node = Binary(op.text, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.accept("^"):
            return Binary("^", base, self.unary())
        return base

    def primary(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self.advance()
            return Number(float(token.text))
        if token.kind == "ident":
            self.advance()
            name = token.text
            if name in FUNCTIONS:
                self.expect("(")
                arg = self.expression()
                self.expect(")")
                return Call(name, arg)
            if name in VARIABLES:
                return Var(name)
            if name in CONSTANTS:
                return Const(name)
            raise UnknownIdentifier(name, token.position)
        if self.accept("("):
            node = self.expression()
            self.expect(")")
            return node
        raise ExprSyntaxError(token.position, "an expression", self.source)


def parse(source: str) -> Expr:
    """
    Parse expression text into an immutable tree.

    Parameters:
    - source (str): expression text, e.g. "sin(pi*x)".

    Returns:
    - Expr: the parsed tree.

    Raises:
    - ExprSyntaxError: with the 0-based position and a description of what was expected.
    - UnknownIdentifier: for names outside x, y, t, p, pi, e, sin, cos, exp.
    """
    return _Parser(source).parse()
