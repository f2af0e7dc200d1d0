"""Symbol objects: an entire function together with its Taylor data and derivatives."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import BadRange, NonConvergence, NonFinite
from . import series
from .expr import Node, differentiate, evaluate, parse_symbol, unparse

SYMBOLIC_MAX_ORDER = 4
CAUCHY_RADIUS = 0.5


def _check_finite(values, what="symbol"):
    if not np.all(np.isfinite(values)):
        raise NonFinite(f"{what} overflowed (non-finite value)")
    return values


def _as_output(z, values):
    return complex(values) if np.ndim(z) == 0 else values


class Symbol:
    """Base class.  Subclasses implement ``_eval`` and ``taylor``."""

    truncated: bool = False
    text: str = "<symbol>"

    def _eval(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, z):
        zz = np.asarray(z, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.asarray(self._eval(zz), dtype=complex)
        return _as_output(z, _check_finite(np.broadcast_to(out, zz.shape).copy()))

    def taylor(self, n: int, center: complex = 0.0) -> np.ndarray:
        return cauchy_taylor(self, n, center)

    def derivative(self, j: int, z):
        return cauchy_derivative(self, j, z)

    def __add__(self, other):
        return _combine("+", self, other)

    def __radd__(self, other):
        return _combine("+", other, self)

    def __sub__(self, other):
        return _combine("-", self, other)

    def __rsub__(self, other):
        return _combine("-", other, self)

    def __mul__(self, other):
        return _combine("*", self, other)

    def __rmul__(self, other):
        return _combine("*", other, self)

    def __neg__(self):
        return _combine("*", -1.0, self)

    def __repr__(self):
        return f"{type(self).__name__}({self.text!r})"


class ExprSymbol(Symbol):
    """A symbol given by a closed-form expression."""

    def __init__(self, expr):
        if isinstance(expr, str):
            self.text = expr
            expr = parse_symbol(expr)
        else:
            self.text = unparse(expr)
        self.expr: Node = expr
        self._derivs = [expr]

    def _eval(self, z):
        return evaluate(self.expr, z)

    def taylor(self, n, center=0.0):
        if n < 1:
            raise BadRange("need n >= 1")
        return series.expand(self.expr, n, center)

    def derivative_expr(self, j: int) -> Node:
        while len(self._derivs) <= j:
            self._derivs.append(differentiate(self._derivs[-1]))
        return self._derivs[j]

    def derivative(self, j, z):
        if j < 0:
            raise BadRange("derivative order must be >= 0")
        if j <= SYMBOLIC_MAX_ORDER:
            zz = np.asarray(z, dtype=complex)
            with np.errstate(over="ignore", invalid="ignore"):
                out = evaluate(self.derivative_expr(j), zz)
            return _as_output(z, _check_finite(out, "symbol derivative"))
        return cauchy_derivative(self, j, z)


class PolySymbol(Symbol):
    """A symbol given by (possibly truncated) Taylor coefficients about 0.

    Coefficient lists stand in for entire functions outside the expression
    grammar, so they are flagged ``truncated`` unless told otherwise.
    """

    def __init__(self, coeffs: Sequence[complex], truncated: bool = True):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim != 1 or len(c) == 0:
            raise BadRange("coefficient list must be a non-empty 1-d sequence")
        self.coeffs = c
        self.truncated = truncated
        self.text = "poly[" + ", ".join(format(complex(a), ".17g") for a in c) + "]"

    def _eval(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def taylor(self, n, center=0.0):
        if n < 1:
            raise BadRange("need n >= 1")
        out = np.zeros(n, dtype=complex)
        c = self.coeffs
        k = 0
        while len(c) and k < n:
            out[k] = np.polynomial.polynomial.polyval(center, c) / factorial(k)
            c = np.polynomial.polynomial.polyder(c) if len(c) > 1 else np.zeros(0)
            k += 1
        return out

    def derivative(self, j, z):
        if j < 0:
            raise BadRange("derivative order must be >= 0")
        if j >= len(self.coeffs):
            return _as_output(z, np.zeros(np.shape(z), dtype=complex))
        d = np.polynomial.polynomial.polyder(self.coeffs, j)
        return _as_output(z, np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), d))


class FunctionSymbol(Symbol):
    """A symbol given by a vectorised callable, with optional Taylor data."""

    def __init__(self, func: Callable, text: str = "<callable>",
                 taylor: Optional[Callable[[int], np.ndarray]] = None):
        self.func = func
        self.text = text
        self._taylor = taylor

    def _eval(self, z):
        return self.func(z)

    def taylor(self, n, center=0.0):
        if self._taylor is not None and center == 0:
            return np.asarray(self._taylor(n), dtype=complex)[:n]
        return cauchy_taylor(self, n, center)


@dataclass
class CombinedSymbol(Symbol):
    """Sum, difference or product of two symbols (or a symbol and a constant)."""

    op: str
    left: object
    right: object
    text: str = field(init=False)

    def __post_init__(self):
        self.text = f"({_text(self.left)}{self.op}{_text(self.right)})"
        self.truncated = getattr(self.left, "truncated", False) or getattr(self.right, "truncated", False)

    def _eval(self, z):
        a, b = _value(self.left, z), _value(self.right, z)
        return a + b if self.op == "+" else a - b if self.op == "-" else a * b

    def taylor(self, n, center=0.0):
        a, b = _taylor(self.left, n, center), _taylor(self.right, n, center)
        return a + b if self.op == "+" else a - b if self.op == "-" else series.mul(a, b)

    def derivative(self, j, z):
        if self.op in "+-":
            a, b = _deriv(self.left, j, z), _deriv(self.right, j, z)
            return a + b if self.op == "+" else a - b
        from math import comb
        return sum(comb(j, i) * _deriv(self.left, i, z) * _deriv(self.right, j - i, z)
                   for i in range(j + 1))


def _text(x):
    return x.text if isinstance(x, Symbol) else format(complex(x), ".17g")


def _value(x, z):
    return x(z) if isinstance(x, Symbol) else np.full(np.shape(z), complex(x))


def _taylor(x, n, center):
    return x.taylor(n, center) if isinstance(x, Symbol) else series.constant(complex(x), n)


def _deriv(x, j, z):
    if isinstance(x, Symbol):
        return x.derivative(j, z)
    return complex(x) if j == 0 else 0.0


def _combine(op, a, b):
    if not isinstance(a, (Symbol, int, float, complex)) or not isinstance(b, (Symbol, int, float, complex)):
        return NotImplemented
    if all(isinstance(x, ExprSymbol) or not isinstance(x, Symbol) for x in (a, b)):
        from .expr import BinOp, Num
        ea = a.expr if isinstance(a, ExprSymbol) else Num(complex(a))
        eb = b.expr if isinstance(b, ExprSymbol) else Num(complex(b))
        return ExprSymbol(BinOp(op, ea, eb))
    return CombinedSymbol(op, a, b)


def cauchy_derivative(phi: Callable, j: int, z, radius: float = CAUCHY_RADIUS,
                      rtol: float = 1e-13, max_nodes: int = 4096):
    """``phi^(j)(z)`` from the Cauchy integral on a circle of ``radius`` about ``z``.

    Uses the trapezoid rule, doubling nodes until successive values agree.
    The radius is halved (down to 1/64 of its start) whenever ``phi``
    overflows on the circle.
    """
    if j < 0:
        raise BadRange("derivative order must be >= 0")
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    r = radius
    while True:
        try:
            out = _cauchy_at_radius(phi, j, zz, r, rtol, max_nodes)
            break
        except NonFinite:
            r /= 2
            if r < radius / 64:
                raise
    return complex(out[0]) if np.ndim(z) == 0 else out.reshape(np.shape(z))


def _cauchy_at_radius(phi, j, zz, r, rtol, max_nodes):
    n = max(32, 4 * (j + 1))
    prev = None
    while n <= max_nodes:
        theta = 2 * np.pi * np.arange(n) / n
        u = r * np.exp(1j * theta)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(phi(zz[:, None] + u[None, :]), dtype=complex)
        _check_finite(vals)
        est = factorial(j) * (vals * u[None, :] ** (-j)).mean(axis=1)
        scale = factorial(j) * np.abs(vals).max(axis=1) / r ** j
        if prev is not None and np.all(np.abs(est - prev) <= rtol * np.maximum(1.0, scale) * 1e3):
            return est
        prev = est
        n *= 2
    raise NonConvergence(f"Cauchy derivative of order {j} did not converge")


def cauchy_taylor(phi: Callable, n: int, center: complex = 0.0, radius: float = 1.0,
                  nodes: int = 1024) -> np.ndarray:
    """First ``n`` Taylor coefficients of ``phi`` about ``center`` by FFT on a circle."""
    if n < 1:
        raise BadRange("need n >= 1")
    m = max(nodes, 2 * n)
    u = radius * np.exp(2j * np.pi * np.arange(m) / m)
    vals = _check_finite(np.asarray(phi(center + u), dtype=complex))
    coeffs = np.fft.fft(vals)[:n] / m
    return coeffs / radius ** np.arange(n)


def make_symbol(spec) -> Symbol:
    """Build a :class:`Symbol` from an expression string, a coefficient list,
    a callable, or an existing symbol."""
    if isinstance(spec, Symbol):
        return spec
    if isinstance(spec, str):
        return ExprSymbol(spec)
    if callable(spec):
        return FunctionSymbol(spec)
    return PolySymbol(spec)


def eval_symbol(s, z):
    """``phi(z)``; raises ``NonFinite`` on overflow."""
    return make_symbol(s)(z)


def taylor_coeffs(s, n: int, center: complex = 0.0) -> np.ndarray:
    """``a_0 .. a_{n-1}`` of ``phi`` about ``center``."""
    return make_symbol(s).taylor(n, center)


def symbol_derivative(s, j: int, z):
    """``phi^(j)(z)``: symbolic for ``j <= 4`` where available, Cauchy integral otherwise."""
    return make_symbol(s).derivative(j, z)
