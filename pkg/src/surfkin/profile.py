"""Profile-expression mini-language for radii ``rho(z)`` of surfaces of revolution.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?            # right associative
    atom   := NUMBER | 'z' | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := sin | cos | sinh | cosh | exp | log | sqrt

Expressions are evaluated on :class:`~surfkin.dual.Dual2` jets, so a single
evaluation returns ``(rho, rho', rho'')`` exactly.  Error offsets are byte
offsets into the UTF-8 encoding of the source text.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import dual
from .errors import ProfileError


class ProfileSyntaxError(ProfileError):
    def __init__(self, message, start, end=None):
        self.start = start
        self.end = start if end is None else end
        super().__init__(f"{message} at offset {start}")


class ProfileDomainError(ProfileError, ArithmeticError):
    pass


@dataclass(frozen=True)
class Num:
    value: float
    span: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    span: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Neg:
    operand: object
    span: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    span: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    name: str
    arg: object
    span: tuple = field(default=(0, 0), compare=False, repr=False)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text):
    """Return tokens ``(kind, value, byte_start, byte_end)`` plus an end marker."""
    tokens = []
    pos = 0
    n = len(text)

    def boff(i):
        return len(text[:i].encode("utf-8"))

    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ProfileSyntaxError(f"unexpected character {text[pos]!r}", boff(pos), boff(pos + 1))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), boff(start), boff(m.end())))
        pos = m.end()
    end = boff(n)
    tokens.append(("end", "", end, end))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, value, start, end = self.peek()
        if kind != "op" or value != op:
            found = "end of input" if kind == "end" else repr(value)
            raise ProfileSyntaxError(f"expected {op!r}, found {found}", start, end)
        return self.take()

    def parse(self):
        node = self.expr()
        kind, value, start, end = self.peek()
        if kind != "end":
            raise ProfileSyntaxError(f"unexpected token {value!r}", start, end)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            node = BinOp(op, node, rhs, (node.span[0], rhs.span[1]))
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.unary()
            node = BinOp(op, node, rhs, (node.span[0], rhs.span[1]))
        return node

    def unary(self):
        kind, value, start, _ = self.peek()
        if kind == "op" and value == "-":
            self.take()
            inner = self.unary()
            return Neg(inner, (start, inner.span[1]))
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            exponent = self.unary()
            return BinOp("^", base, exponent, (base.span[0], exponent.span[1]))
        return base

    def atom(self):
        kind, value, start, end = self.take()
        if kind == "num":
            v = float(value)
            if not math.isfinite(v):
                raise ProfileSyntaxError("numeric literal out of range", start, end)
            return Num(v, (start, end))
        if kind == "name":
            if value == "z":
                return Var((start, end))
            if value not in dual.FUNCTIONS:
                raise ProfileSyntaxError(f"unknown identifier {value!r}", start, end)
            self.expect_op("(")
            arg = self.expr()
            close = self.expect_op(")")
            return Call(value, arg, (start, close[3]))
        if kind == "op" and value == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        found = "end of input" if kind == "end" else repr(value)
        raise ProfileSyntaxError(f"expected a number, 'z', a function or '(', found {found}", start, end)


def parse_profile(text):
    """Parse ``text`` into a :class:`ProfileExpr`."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return ProfileExpr(text, _Parser(text).parse())


def pretty(node):
    """Fully parenthesised source for an AST; reparses to an equal tree."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "z"
    if isinstance(node, Neg):
        return f"(-{pretty(node.operand)})"
    if isinstance(node, BinOp):
        return f"({pretty(node.left)} {node.op} {pretty(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({pretty(node.arg)})"
    raise TypeError(f"not a profile AST node: {node!r}")


def _eval(node, z):
    if isinstance(node, Num):
        return dual.Dual2.constant(node.value)
    if isinstance(node, Var):
        return z
    if isinstance(node, Neg):
        return -_eval(node.operand, z)
    if isinstance(node, Call):
        return dual.FUNCTIONS[node.name](_eval(node.arg, z))
    a = _eval(node.left, z)
    b = _eval(node.right, z)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return a / b
    return a ** b


class ProfileExpr:
    """A parsed profile ``rho(z)`` evaluated with exact first and second derivatives."""

    def __init__(self, text, ast):
        self.text = text
        self.ast = ast

    def __repr__(self):
        return f"ProfileExpr({self.text!r})"

    def pretty(self):
        return pretty(self.ast)

    def jet(self, z):
        """``(rho, rho', rho'')`` at ``z`` (scalar or array)."""
        zz = dual.Dual2.variable(z)
        try:
            with np.errstate(divide="raise", over="raise", invalid="raise", under="ignore"):
                out = _eval(self.ast, zz)
        except (ValueError, ZeroDivisionError, FloatingPointError) as exc:
            raise ProfileDomainError(f"cannot evaluate {self.text!r}: {exc}") from exc
        shape = np.shape(z)
        return tuple(np.broadcast_to(c, shape).astype(float) for c in out.as_tuple())

    __call__ = jet
