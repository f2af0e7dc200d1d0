"""Expression trees for entire symbols, with a small recursive-descent parser.

Grammar (whitespace is ignored)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := ('-' | '+') unary | factor
    factor   := base ('^' exponent)?
    exponent := INT ('^' exponent)?          # right associative, integers only
    base     := NUMBER | NUMBER 'i' | 'i' | 'z' | FUNC '(' expr ')' | '(' expr ')'
    FUNC     := exp | sin | cos | sinh | cosh
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import ParseError, UnknownFunction

FUNCTIONS = ("exp", "sin", "cos", "sinh", "cosh")


@dataclass(frozen=True)
class Num:
    value: complex


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exp: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Pow, Call]

ZERO = Num(0)
ONE = Num(1)
Z = Var()

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?P<imag>i(?![A-Za-z0-9_]))?"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _tokenize(text):
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    if not text.isascii():
        bad = next(i for i, ch in enumerate(text) if not ch.isascii())
        raise ParseError("non-ASCII character", bad)
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        start = pos + len(text[pos:]) - len(text[pos:].lstrip())
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == start:
            raise ParseError(f"unexpected character {text[start]!r}", start)
        if m.group("num") is not None:
            value = float(m.group("num"))
            tokens.append(("num", 1j * value if m.group("imag") else value, start))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
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

    def expect(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and val == "+":
            self.take()
            return self.unary()
        return self.factor()

    def factor(self):
        base = self.base()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Pow(base, self.exponent())
        return base

    def exponent(self):
        kind, val, pos = self.take()
        if kind != "num" or isinstance(val, complex) or float(val) != int(val) or val < 0:
            raise ParseError("exponent must be a non-negative integer", pos)
        n = int(val)
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            n = n ** self.exponent()
        return n

    def base(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(val)
        if kind == "name":
            if val == "z":
                return Z
            if val == "i":
                return Num(1j)
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            raise UnknownFunction(val, pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise ParseError("unexpected end of expression", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


def parse_symbol(text: str) -> Node:
    """Parse ``text`` into an expression tree.

    >>> parse_symbol("2*z*cosh(z)")
    BinOp(op='*', left=BinOp(op='*', left=Num(value=2.0), right=Var()), right=Call(func='cosh', arg=Var()))
    """
    return _Parser(text).parse()


def _num_text(v: complex) -> str:
    v = complex(v)
    if v.imag == 0:
        return repr(v.real) if v.real >= 0 else f"({v.real!r})"
    if v.real == 0:
        return repr(v.imag) + "i" if v.imag > 0 else f"({v.imag!r}i)"
    return f"({v.real!r}+{v.imag!r}i)"


def unparse(node: Node) -> str:
    """Fully parenthesised text that parses back to ``node``."""
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Var):
        return "z"
    if isinstance(node, Neg):
        return f"(-{unparse(node.arg)})"
    if isinstance(node, BinOp):
        return f"({unparse(node.left)}{node.op}{unparse(node.right)})"
    if isinstance(node, Pow):
        return f"({unparse(node.base)}^{node.exp})"
    if isinstance(node, Call):
        return f"{node.func}({unparse(node.arg)})"
    raise TypeError(node)


# --- construction helpers with light constant folding ---------------------

def _is(node, value):
    return isinstance(node, Num) and node.value == value


def add(a, b):
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    return BinOp("+", a, b)


def sub(a, b):
    if _is(b, 0):
        return a
    if _is(a, 0):
        return neg(b)
    return BinOp("-", a, b)


def neg(a):
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def mul(a, b):
    if _is(a, 0) or _is(b, 0):
        return ZERO
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    return BinOp("*", a, b)


def div(a, b):
    if _is(a, 0):
        return ZERO
    if _is(b, 1):
        return a
    return BinOp("/", a, b)


def power(a, n):
    if n == 0:
        return ONE
    if n == 1:
        return a
    return Pow(a, n)


def differentiate(node: Node) -> Node:
    """Symbolic d/dz of an expression tree."""
    if isinstance(node, Num):
        return ZERO
    if isinstance(node, Var):
        return ONE
    if isinstance(node, Neg):
        return neg(differentiate(node.arg))
    if isinstance(node, BinOp):
        a, b = node.left, node.right
        da, db = differentiate(a), differentiate(b)
        if node.op == "+":
            return add(da, db)
        if node.op == "-":
            return sub(da, db)
        if node.op == "*":
            return add(mul(da, b), mul(a, db))
        return div(sub(mul(da, b), mul(a, db)), power(b, 2))
    if isinstance(node, Pow):
        if node.exp == 0:
            return ZERO
        return mul(mul(Num(node.exp), power(node.base, node.exp - 1)), differentiate(node.base))
    if isinstance(node, Call):
        u, du = node.arg, differentiate(node.arg)
        outer = {
            "exp": Call("exp", u),
            "sin": Call("cos", u),
            "cos": neg(Call("sin", u)),
            "sinh": Call("cosh", u),
            "cosh": Call("sinh", u),
        }[node.func]
        return mul(outer, du)
    raise TypeError(node)


# --- numerical evaluation --------------------------------------------------

REMOVABLE_FLOOR = 1e-8
_FALLBACK_RADIUS = 0.05
_FALLBACK_NODES = 32

_UFUNCS = {"exp": np.exp, "sin": np.sin, "cos": np.cos, "sinh": np.sinh, "cosh": np.cosh}


def evaluate(node: Node, z, _fallback=True):
    """Evaluate ``node`` at the complex array ``z`` (vectorised).

    Quotients whose denominator is below ``REMOVABLE_FLOOR`` in modulus are
    treated as removable singularities: the value is recovered as the mean of
    the quotient over a small circle (the constant term of the local Taylor
    expansion).  A genuine pole raises ``NonFinite``.
    """
    if isinstance(node, Num):
        return np.full(np.shape(z), node.value, dtype=complex)
    if isinstance(node, Var):
        return np.asarray(z, dtype=complex)
    if isinstance(node, Neg):
        return -evaluate(node.arg, z, _fallback)
    if isinstance(node, Pow):
        return evaluate(node.base, z, _fallback) ** node.exp
    if isinstance(node, Call):
        return _UFUNCS[node.func](evaluate(node.arg, z, _fallback))
    a = evaluate(node.left, z, _fallback)
    b = evaluate(node.right, z, _fallback)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    small = np.abs(b) < REMOVABLE_FLOOR
    with np.errstate(divide="ignore", invalid="ignore"):
        out = a / b
    if _fallback and np.any(small):
        out = np.array(out, dtype=complex, copy=True)
        out[small] = _removable_value(node, np.asarray(z, dtype=complex)[small], a[small])
    return out


def _removable_value(node, z0, num0):
    from ..errors import NonFinite

    theta = 2 * np.pi * np.arange(_FALLBACK_NODES) / _FALLBACK_NODES
    ring = z0[:, None] + _FALLBACK_RADIUS * np.exp(1j * theta)[None, :]
    num_ring = evaluate(node.left, ring, _fallback=False)
    scale = np.maximum(1.0, np.abs(num_ring).max(axis=1))
    if np.any(np.abs(num0) > 1e-6 * scale):
        raise NonFinite("quotient has a pole (denominator vanishes, numerator does not)")
    vals = evaluate(node, ring, _fallback=False)
    return vals.mean(axis=1)
