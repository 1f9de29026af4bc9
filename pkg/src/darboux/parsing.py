"""Text syntax for field elements and operators.

Grammar (whitespace is insignificant)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' exponent)?
    exponent := ['-'] integer | '(' ['-'] integer ')'
    atom   := number | name | '(' expr ')'

A name ``D<var>`` denotes the derivation by ``<var>``; every other name is a
symbol of the context or, for operators, a binding. Products are taken left to
right and do not commute once derivations are involved. Division is allowed
only by elements of K. The unicode minus sign is accepted for ``-``.
"""

import re
from fractions import Fraction

from .errors import DivisionByZero, ParseError, UnknownSymbol
from .kfield import FieldElement
from .opring import LinOp

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z][A-Za-z0-9_]*)|(.))")


def _tokenize(src):
    src = src.replace("−", "-")
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            break
        start = m.start(m.lastindex) if m.lastindex else len(src)
        number, name, other = m.groups()
        if number is not None:
            tokens.append(("num", number, start))
        elif name is not None:
            tokens.append(("name", name, start))
        elif other is not None:
            if other not in "+-*/^()":
                raise ParseError(f"unexpected character {other!r}", start, src)
            tokens.append((other, other, start))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src, ctx, operators, bindings):
        self.src = src
        self.ctx = ctx
        self.operators = operators
        self.bindings = bindings or {}
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok[2], self.src)

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty expression")
        value = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = _add(value, rhs) if op == "+" else _add(value, _neg(rhs))
        return value

    def term(self):
        value = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op[0] == "*":
                value = _mul(value, rhs)
            else:
                if isinstance(rhs, LinOp):
                    if not rhs.is_scalar():
                        self.error("division by an operator of positive order", op)
                    rhs = rhs.scalar_value()
                if rhs.is_zero():
                    raise DivisionByZero(f"division by zero at position {op[2]}")
                value = _mul(value, rhs.inverse())
        return value

    def unary(self):
        kind = self.peek()[0]
        if kind == "-":
            self.take()
            return _neg(self.unary())
        if kind == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] != "^":
            return base
        caret = self.take()
        wrapped = self.peek()[0] == "("
        if wrapped:
            self.take()
        negative = False
        if self.peek()[0] == "-":
            self.take()
            negative = True
        tok = self.take()
        if tok[0] != "num" or not tok[1].isdigit():
            self.error("exponent must be an integer", tok)
        if wrapped:
            if self.peek()[0] != ")":
                self.error("expected ')'")
            self.take()
        n = int(tok[1])
        if negative:
            n = -n
            if isinstance(base, LinOp):
                if not base.is_scalar():
                    self.error("negative power of an operator", caret)
                base = base.scalar_value()
            if base.is_zero():
                raise DivisionByZero(f"negative power of zero at position {caret[2]}")
        return base ** n

    def atom(self):
        tok = self.take()
        kind, text, pos = tok
        if kind == "num":
            return self.ctx.const(Fraction(text))
        if kind == "(":
            value = self.expr()
            if self.peek()[0] != ")":
                self.error("expected ')'")
            self.take()
            return value
        if kind == "name":
            return self.name(text, pos)
        if kind == "end":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected {text!r}", tok)

    def name(self, text, pos):
        if text in self.bindings:
            value = self.bindings[text]
            if isinstance(value, LinOp) and not self.operators:
                if not value.is_scalar():
                    raise ParseError(f"{text!r} is an operator, expected a field element", pos, self.src)
                value = value.scalar_value()
            return value
        if self.ctx.has_symbol(text):
            return self.ctx.symbol(text)
        if text.startswith("D") and text[1:] in self.ctx.variables:
            if not self.operators:
                raise ParseError(f"derivation {text!r} in a field expression", pos, self.src)
            return LinOp.d(self.ctx, text[1:])
        raise UnknownSymbol(f"unknown symbol {text!r} at position {pos}")


def _neg(v):
    return -v


def _add(u, v):
    if isinstance(u, FieldElement) and isinstance(v, LinOp):
        return v + u
    return u + v


def _mul(u, v):
    if isinstance(u, FieldElement) and isinstance(v, FieldElement):
        return u * v
    if isinstance(u, FieldElement):
        u = LinOp.scalar(v.ctx, u)
    if isinstance(v, FieldElement):
        v = LinOp.scalar(u.ctx, v)
    return u * v


def parse_field(src, ctx, bindings=None):
    """Parse ``src`` as an element of K."""
    value = _Parser(src, ctx, False, bindings).parse()
    if isinstance(value, LinOp):
        value = value.scalar_value()
    return value


def parse_operator(src, ctx, bindings=None):
    """Parse ``src`` as an operator in normal form."""
    value = _Parser(src, ctx, True, bindings).parse()
    if isinstance(value, FieldElement):
        value = LinOp.scalar(ctx, value)
    return value
