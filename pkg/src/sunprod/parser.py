"""Recursive-descent parser for polynomial expressions.

Grammar (whitespace-insensitive)::

    expr     := ["-"] term (("+" | "-") term)*
    term     := factor ("*" factor)*
    factor   := atom ("^" uint)*
    atom     := rational | "x" uint | "nu" | "(" expr ")"
    rational := uint ["/" uint]

Variables are 1-based.  ``nu`` is accepted only by ``parse_series``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


from .poly import NuSeries, Polynomial, Rational


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


# -- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    value: Rational


@dataclass(frozen=True)
class Var:
    index: int  # 0-based


@dataclass(frozen=True)
class Nu:
    pass


@dataclass(frozen=True)
class Power:
    base: object
    exponent: int


@dataclass(frozen=True)
class Product:
    factors: tuple


@dataclass(frozen=True)
class Sum:
    terms: tuple  # of (sign, node) with sign in {+1, -1}


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>x\d+)|(?P<nu>nu)|(?P<op>[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, dim: int, allow_nu: bool):
        self.tokens = _tokenize(text)
        self.i = 0
        self.dim = dim
        self.allow_nu = allow_nu

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, value, pos = self.take()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}, found {value or 'end of input'!r}", pos)

    def parse(self):
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {value!r}", pos)
        return node

    def expr(self):
        terms = []
        sign = 1
        kind, value, _ = self.peek()
        if kind == "op" and value in "+-":
            self.take()
            sign = -1 if value == "-" else 1
        terms.append((sign, self.term()))
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.take()
                terms.append((-1 if value == "-" else 1, self.term()))
            else:
                break
        if len(terms) == 1 and terms[0][0] == 1:
            return terms[0][1]
        return Sum(tuple(terms))

    def term(self):
        factors = [self.factor()]
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == "*":
                self.take()
                factors.append(self.factor())
            else:
                break
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self):
        node = self.atom()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == "^":
                self.take()
                kind, value, pos = self.take()
                if kind != "num":
                    raise ParseError("exponent must be a non-negative integer literal", pos)
                node = Power(node, int(value))
            else:
                break
        return node

    def atom(self):
        kind, value, pos = self.take()
        if kind == "num":
            num = int(value)
            nkind, nvalue, _ = self.peek()
            if nkind == "op" and nvalue == "/":
                self.take()
                dkind, dvalue, dpos = self.take()
                if dkind != "num":
                    raise ParseError("denominator must be an integer literal", dpos)
                if int(dvalue) == 0:
                    raise ParseError("zero denominator", dpos)
                return Literal(Rational(num, int(dvalue)))
            return Literal(Rational(num))
        if kind == "var":
            idx = int(value[1:])
            if not 1 <= idx <= self.dim:
                raise ParseError(f"variable {value} out of range for dimension {self.dim}", pos)
            return Var(idx - 1)
        if kind == "nu":
            if not self.allow_nu:
                raise ParseError("'nu' is not allowed in a polynomial", pos)
            return Nu()
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(f"unexpected {value or 'end of input'!r}", pos)


def parse_ast(text: str, dim: int, *, allow_nu: bool = False):
    return _Parser(text, dim, allow_nu).parse()


def evaluate(node, dim: int) -> Polynomial:
    """Evaluate an AST in ``dim`` variables; ``Nu`` maps to variable ``dim - 1``."""
    if isinstance(node, Literal):
        return Polynomial.constant(dim, node.value)
    if isinstance(node, Var):
        return Polynomial.var(dim, node.index)
    if isinstance(node, Nu):
        return Polynomial.var(dim, dim - 1)
    if isinstance(node, Power):
        return evaluate(node.base, dim) ** node.exponent
    if isinstance(node, Product):
        out = Polynomial.one(dim)
        for f in node.factors:
            out = out * evaluate(f, dim)
        return out
    if isinstance(node, Sum):
        out = Polynomial.zero(dim)
        for sign, t in node.terms:
            v = evaluate(t, dim)
            out = out + v if sign > 0 else out - v
        return out
    raise TypeError(f"unknown node {node!r}")


def parse_expression(text: str, dim: int) -> Polynomial:
    return evaluate(parse_ast(text, dim), dim)


def parse_series(text: str, dim: int, order: int) -> NuSeries:
    """Parse an expression that may contain ``nu``; higher powers are truncated."""
    ext = evaluate(parse_ast(text, dim, allow_nu=True), dim + 1)
    coeffs: list[dict] = [dict() for _ in range(order + 1)]
    for k, c in ext.items():
        r = k[-1]
        if r <= order:
            coeffs[r][k[:-1]] = c
    return NuSeries(dim, order, [Polynomial(dim, c) for c in coeffs])
