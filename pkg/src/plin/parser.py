"""Recursive-descent parser for rational-function expressions.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' uint)?
    base   := number | identifier | '(' expr ')' | '-' factor

Numbers are unsigned integers; ``p/q`` is the quotient of two of them, so
``3/2^2`` is ``3/4`` and ``x/2/3`` is ``x/6``.  Whitespace is ignored.
"""
from __future__ import annotations

from typing import NamedTuple

from plin.errors import ParseError, UnknownVariableError, ZeroDenominatorError
from plin.expr import RatFunc, VarTable


class Token(NamedTuple):
    kind: str  # "num", "ident", "op", "end"
    text: str
    pos: int


_OPS = set("+-*/^()")


def tokenize(text: str) -> list[Token]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("num", text[i:j], i))
            i = j
        elif c.isascii() and c.isalpha():
            j = i
            while j < n and (text[j].isascii() and (text[j].isalnum() or text[j] == "_")):
                j += 1
            tokens.append(Token("ident", text[i:j], i))
            i = j
        elif c in _OPS:
            tokens.append(Token("op", c, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {c!r}", text, i)
    tokens.append(Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, table: VarTable):
        self.text = text
        self.table = table
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, self.text, tok.pos)

    def expect(self, text):
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            raise self.error(f"expected {text!r}, found {found}")
        return self.advance()

    def parse(self) -> RatFunc:
        value = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise self.error(f"unexpected {tok.text!r}")
        return value

    def expr(self) -> RatFunc:
        value = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RatFunc:
        value = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            tok = self.advance()
            rhs = self.factor()
            if tok.text == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ZeroDenominatorError("division by the zero polynomial", tok.pos)
                value = value / rhs
        return value

    def factor(self) -> RatFunc:
        value = self.base()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            exp = self.peek()
            if exp.kind != "num":
                raise self.error("exponent must be a nonnegative integer literal")
            self.advance()
            value = value ** int(exp.text)
        return value

    def base(self) -> RatFunc:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return self.table.const(int(tok.text))
        if tok.kind == "ident":
            self.advance()
            if tok.text not in self.table:
                raise UnknownVariableError(f"unknown identifier {tok.text!r}", tok.pos)
            return self.table.var(tok.text)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            value = self.expr()
            self.expect(")")
            return value
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return -self.factor()
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise self.error(f"expected a number, identifier, '(' or '-', found {found}")


def parse_expr(text: str, vars: VarTable) -> RatFunc:
    """Parse ``text`` into its canonical rational function over ``vars``."""
    return _Parser(text, vars).parse()
