"""Truncated power-series arithmetic on coefficient arrays.

A series is a complex array ``a`` with ``a[k]`` the coefficient of
``(z - c)**k``.  All operations keep the length of their inputs.
"""

from __future__ import annotations

import numpy as np

from ..errors import SeriesDivisionByZero
from .expr import BinOp, Call, Neg, Node, Num, Pow, Var

VALUATION_RTOL = 1e-13
_MAX_SHIFT = 64


def constant(c, n):
    out = np.zeros(n, dtype=complex)
    out[0] = c
    return out


def variable(center, n):
    out = np.zeros(n, dtype=complex)
    out[0] = center
    if n > 1:
        out[1] = 1.0
    return out


def mul(a, b):
    return np.convolve(a, b)[: len(a)]


def valuation(a, rtol=VALUATION_RTOL):
    """Index of the first coefficient that is not negligible, or None."""
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    nz = np.nonzero(np.abs(a) > rtol * scale)[0]
    return int(nz[0]) if len(nz) else None


def reciprocal_div(a, b):
    """``a / b`` for ``b[0] != 0`` by the triangular recurrence."""
    n = len(a)
    q = np.zeros(n, dtype=complex)
    b0 = b[0]
    for k in range(n):
        q[k] = (a[k] - np.dot(b[1:k + 1], q[k - 1::-1][:k])) / b0 if k else a[0] / b0
    return q


def _derivative_weights(a):
    return np.arange(len(a)) * a


def exp(a):
    n = len(a)
    da = _derivative_weights(a)
    w = np.zeros(n, dtype=complex)
    w[0] = np.exp(a[0])
    for k in range(1, n):
        w[k] = np.dot(da[1:k + 1], w[k - 1::-1][:k]) / k
    return w


def _trig_pair(a, hyperbolic):
    n = len(a)
    da = _derivative_weights(a)
    s = np.zeros(n, dtype=complex)
    c = np.zeros(n, dtype=complex)
    if hyperbolic:
        s[0], c[0], sign = np.sinh(a[0]), np.cosh(a[0]), 1.0
    else:
        s[0], c[0], sign = np.sin(a[0]), np.cos(a[0]), -1.0
    for k in range(1, n):
        s[k] = np.dot(da[1:k + 1], c[k - 1::-1][:k]) / k
        c[k] = sign * np.dot(da[1:k + 1], s[k - 1::-1][:k]) / k
    return s, c


def power(a, m):
    result = constant(1.0, len(a))
    base = a
    while m:
        if m & 1:
            result = mul(result, base)
        m >>= 1
        if m:
            base = mul(base, base)
    return result


def expand(node: Node, n: int, center: complex = 0.0) -> np.ndarray:
    """First ``n`` Taylor coefficients of the expression ``node`` about ``center``.

    Quotients are reduced by cancelling the common power of ``(z - center)``:
    the numerator must vanish to at least the order of the denominator.

    Raises
    ------
    SeriesDivisionByZero
        A denominator vanishes to higher order than its numerator (a pole),
        or identically.
    """
    if isinstance(node, Num):
        return constant(node.value, n)
    if isinstance(node, Var):
        return variable(center, n)
    if isinstance(node, Neg):
        return -expand(node.arg, n, center)
    if isinstance(node, Pow):
        return power(expand(node.base, n, center), node.exp)
    if isinstance(node, Call):
        a = expand(node.arg, n, center)
        if node.func == "exp":
            return exp(a)
        s, c = _trig_pair(a, node.func in ("sinh", "cosh"))
        return s if node.func in ("sin", "sinh") else c
    if node.op == "+":
        return expand(node.left, n, center) + expand(node.right, n, center)
    if node.op == "-":
        return expand(node.left, n, center) - expand(node.right, n, center)
    if node.op == "*":
        return mul(expand(node.left, n, center), expand(node.right, n, center))
    return _divide(node, n, center)


def _divide(node: BinOp, n, center):
    pad = 4
    while True:
        b = expand(node.right, n + pad, center)
        v = valuation(b)
        if v is not None and v <= pad:
            break
        if pad >= _MAX_SHIFT:
            raise SeriesDivisionByZero("denominator series vanishes to very high order (or identically)")
        pad *= 2
    a = expand(node.left, n + v, center)
    if v:
        scale = max(1.0, float(np.abs(a).max()))
        if np.any(np.abs(a[:v]) > 1e-10 * scale):
            raise SeriesDivisionByZero(
                f"denominator vanishes to order {v} at {center} but the numerator does not")
    return reciprocal_div(a[v:v + n], b[v:v + n])
