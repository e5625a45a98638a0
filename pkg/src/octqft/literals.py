"""Parsing of polynomial and class literals.

One small recursive-descent parser handles every textual surface: integer and
rational literals, identifiers, ``+ - * ^``, parentheses, and the tensor
separator ``(x)`` used by interval/open class literals.  ``^`` binds tighter
than ``*``, which binds tighter than ``+``/``-``; ``(x)`` sits between ``*``
and ``+``.  Whitespace is insignificant.

The parser is generic over an adapter so the same grammar can produce plain
polynomials, mixed (polynomial x exterior) classes, or tensor classes.  Note
the lexer claims the exact substring ``(x)`` as the tensor separator, so a
variable named bare ``x`` cannot be written inside its own parentheses.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .poly import Polynomial, PolyRing, Variable


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


_TENSOR = "(x)"


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens: list[tuple[str, object, int]] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith(_TENSOR, i):
            tokens.append(("TENSOR", _TENSOR, i))
            i += 3
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("INT", int(text[i:j]), i))
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("IDENT", text[i:j], i))
            i = j
            continue
        if ch in "+-*^()/,;|":
            tokens.append((ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(("END", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str, adapter):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.adapter = adapter

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1]!r}", tok[2])
        self.pos += 1
        return tok

    # expr := tens (("+" | "-") tens)*
    def expr(self):
        value = self.tens()
        while self.peek()[0] in "+-":
            op = self.take()[0]
            rhs = self.tens()
            value = self.adapter.add(value, rhs) if op == "+" else self.adapter.sub(value, rhs)
        return value

    # tens := prod (TENSOR prod)*
    def tens(self):
        parts = [self.prod()]
        while self.peek()[0] == "TENSOR":
            pos = self.take()[2]
            parts.append(self.prod())
        if len(parts) == 1:
            return parts[0]
        return self.adapter.tensor(parts, pos)

    # prod := unary ("*" unary)*
    def prod(self):
        value = self.unary()
        while self.peek()[0] == "*":
            self.take()
            value = self.adapter.mul(value, self.unary())
        return value

    # unary := "-" unary | power
    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            return self.adapter.neg(self.unary())
        return self.power()

    # power := base ("^" INT)?
    def power(self):
        value = self.base()
        if self.peek()[0] == "^":
            self.take()
            tok = self.take("INT")
            return self.adapter.pow(value, tok[1])
        return value

    # base := NUMBER | IDENT | "(" expr ")"
    def base(self):
        kind, val, pos = self.peek()
        if kind == "INT":
            self.take()
            if self.peek()[0] == "/":
                self.take()
                den = self.take("INT")
                if den[1] == 0:
                    raise ParseError("zero denominator", den[2])
                return self.adapter.const(Fraction(val, den[1]))
            return self.adapter.const(Fraction(val))
        if kind == "IDENT":
            self.take()
            return self.adapter.ident(val, pos)
        if kind == "(":
            self.take()
            value = self.expr()
            self.take(")")
            return value
        raise ParseError(f"expected a term, found {val!r}" if val is not None
                         else "unexpected end of input", pos)


def parse_with(text: str, adapter):
    p = _Parser(text, adapter)
    value = p.expr()
    kind, val, pos = p.peek()
    if kind != "END":
        raise ParseError(f"trailing input {val!r}", pos)
    return value


class PolynomialAdapter:
    """Adapter producing a plain Polynomial in a fixed ring."""

    def __init__(self, ring: PolyRing, scope: Mapping[str, Variable] | None = None):
        self.ring = ring
        if scope is None:
            scope = {v.name: v for v in ring.variables}
        self.scope = scope

    def const(self, q: Fraction) -> Polynomial:
        return self.ring.const(self.ring.field.of(q))

    def ident(self, name: str, pos: int) -> Polynomial:
        v = self.scope.get(name)
        if v is None:
            raise ParseError(f"unknown variable {name!r}", pos)
        return self.ring.gen(v)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def pow(self, a, n):
        return a ** n

    def tensor(self, parts, pos):
        raise ParseError("tensor separator not allowed in a plain polynomial", pos)


def parse_polynomial(text: str, ring: PolyRing,
                     scope: Mapping[str, Variable] | None = None) -> Polynomial:
    return parse_with(text, PolynomialAdapter(ring, scope))
