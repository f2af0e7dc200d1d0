"""Applying a symbol ``phi(d/dx)`` to functions of exponential type.

Exponential polynomials are handled exactly, atom by atom.  Taylor data goes
through the Borel transform: ``phi(d/dx) f`` has Borel transform ``phi * B(f)``
on any circle enclosing the type disk.  Sampled, band-limited data is handled
spectrally (:func:`fourier_multiplier_apply`, :func:`partial_sum_apply`).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from .borel import borel_taylor
from .errors import BadRange, CutoffTooLow
from .expfun import ContourFunction, ExpPoly, TaylorRep, _lgamma_vec
from .numerics import Circle, _gl_w, _gl_x
from .symbols import Symbol, make_symbol


def _atom_image(phi: Symbol, zeta: complex, p: np.ndarray) -> np.ndarray:
    # q = sum_j phi^(j)(zeta)/j! * p^(j)
    q = np.zeros(len(p), dtype=complex)
    dp = p.copy()
    for j in range(len(p)):
        q[: len(dp)] += complex(phi.derivative(j, zeta)) / factorial(j) * dp
        dp = np.polynomial.polynomial.polyder(dp) if len(dp) > 1 else np.zeros(0)
    return q


def apply_symbol(phi, f, radius: Optional[float] = None, K: Optional[int] = None):
    """``phi(d/dx) f``.

    Parameters
    ----------
    phi : Symbol or str or coefficient list
    f : ExpPoly, TaylorRep or ContourFunction
        Exponential polynomials are mapped exactly.  A ``TaylorRep`` is mapped
        through ``phi * B(f)`` on the circle ``|zeta| = radius`` (default
        ``tau + 1``) and returned as a ``TaylorRep`` with the same prefix
        length.  A ``ContourFunction`` keeps its contour and gets ``phi * H``.
    """
    phi = make_symbol(phi)
    if isinstance(f, ExpPoly):
        return ExpPoly.from_atoms([(z, _atom_image(phi, z, p)) for z, p in f.atoms])
    if isinstance(f, TaylorRep):
        R = f.tau + 1.0 if radius is None else radius
        B = borel_taylor(f)
        g = ContourFunction(lambda z: phi(z) * B(z), Circle(0.0, R))
        return TaylorRep(g.taylor(K or f.K), f.tau)
    if isinstance(f, ContourFunction):
        H = f.H
        return ContourFunction(lambda z: phi(z) * H(z), f.contour, f.tol)
    raise TypeError(f"cannot apply a symbol to {type(f).__name__}")


@dataclass(frozen=True)
class PartialSum:
    values: np.ndarray
    l1_norm: float
    interval: Tuple[float, float]


def _l1(x, v, interval):
    a, b = interval
    m = (x >= a - 1e-12) & (x <= b + 1e-12)
    return float(trapezoid(np.abs(v[m]), x[m]))


def partial_sum_apply(phi, K: int, x: np.ndarray, f: np.ndarray, cutoff: Optional[float] = None,
                      interval: Tuple[float, float] = (-2.0, 2.0)) -> PartialSum:
    """``f_K = sum_{k<=K} a_k f^(k)`` on a periodic grid, computed spectrally.

    The discrete Fourier transform of ``f`` is multiplied by
    ``sum_{k<=K} a_k (i xi)^k`` and inverted.  Frequencies above ``cutoff``
    are discarded first, so ``f`` is treated as band-limited to ``cutoff``.

    Raises
    ------
    CutoffTooLow
        The multiplier bound ``sum_k |a_k| cutoff^k`` is not finite.
    """
    if K < 0:
        raise BadRange("K must be >= 0")
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=complex)
    dx = x[1] - x[0]
    a = make_symbol(phi).taylor(K + 1)
    xi = 2 * np.pi * np.fft.fftfreq(len(x), dx)
    F = np.fft.fft(f)
    if cutoff is not None:
        F[np.abs(xi) > cutoff] = 0.0
    Xi = cutoff if cutoff is not None else float(np.abs(xi).max())
    with np.errstate(over="ignore", invalid="ignore"):
        bound = float(np.sum(np.abs(a) * Xi ** np.arange(K + 1)))
    if not np.isfinite(bound):
        raise CutoffTooLow(f"multiplier bound overflows for K = {K} at cutoff {Xi}")
    mult = np.polynomial.polynomial.polyval(1j * xi, a)
    vals = np.fft.ifft(F * mult)
    return PartialSum(vals, _l1(x, vals, interval), tuple(interval))


def fourier_multiplier_apply(psi: Callable, f: np.ndarray, dx: float) -> np.ndarray:
    """``F^{-1}(psi(xi) F f)`` for samples of a band-limited periodic ``f``.

    ``psi`` is evaluated at the angular frequencies ``xi``; the symbol
    ``phi(d/dx)`` corresponds to ``psi(xi) = phi(i xi)``.
    """
    f = np.asarray(f)
    xi = 2 * np.pi * np.fft.fftfreq(len(f), dx)
    out = np.fft.ifft(np.asarray(psi(xi), dtype=complex) * np.fft.fft(f))
    return out.real if np.isrealobj(f) and np.allclose(out.imag, 0, atol=1e-12 * max(1.0, np.abs(out).max())) else out


class ExpPolySymbol(Symbol):
    """A symbol that is itself an exponential polynomial in ``z``."""

    def __init__(self, poly: ExpPoly, text: str = "<exp-poly symbol>"):
        self.poly = poly
        self.text = text
        self._derivs = [poly]

    def _eval(self, z):
        return self.poly(z)

    def taylor(self, n, center=0.0):
        if center == 0:
            return self.poly.taylor(n)
        return super().taylor(n, center)

    def derivative(self, j, z):
        while len(self._derivs) <= j:
            self._derivs.append(self._derivs[-1].derivative())
        return self._derivs[j](z)


@dataclass(frozen=True, eq=False)
class TranslationDifferentialForm:
    """``sum_k p_k(d/dx) f(x + s_k)``, stored as ``(shift s_k, coefficients of p_k)``."""

    terms: Tuple[Tuple[complex, np.ndarray], ...]

    @classmethod
    def from_terms(cls, terms) -> "TranslationDifferentialForm":
        shifts = [complex(s) for s, _ in terms]
        if len(set(shifts)) != len(shifts):
            raise BadRange("shifts must be distinct")
        return cls(tuple((complex(s), np.atleast_1d(np.asarray(p, dtype=complex))) for s, p in terms))

    def to_symbol(self) -> ExpPolySymbol:
        """The symbol ``sum_k p_k(z) e^{s_k z}``."""
        return ExpPolySymbol(ExpPoly.from_atoms(self.terms), "translation-differential form")


def _derivative_evaluator(f, j: int) -> Callable:
    if isinstance(f, ExpPoly):
        g = f
        for _ in range(j):
            g = g.derivative()
        return g
    if isinstance(f, ContourFunction):
        return lambda x: f.derivative(j, x)
    if isinstance(f, TaylorRep):
        b = f.b
        for _ in range(j):
            b = np.polynomial.polynomial.polyder(b) if len(b) > 1 else np.zeros(1)
        return TaylorRep(b, f.tau)
    if isinstance(f, (list, tuple)):
        if j >= len(f):
            raise BadRange(f"derivative of order {j} not supplied")
        return f[j]
    if callable(f) and j == 0:
        return f
    raise BadRange("f must provide derivatives (ExpPoly, ContourFunction, TaylorRep, or a list of callables)")


def translate_apply(T: TranslationDifferentialForm, f) -> Callable:
    """Evaluator ``x -> sum_k p_k(d/dx) f(x + s_k)``.

    ``f`` is an ``ExpPoly``, ``ContourFunction``, ``TaylorRep``, or a list
    ``[f, f', f'', ...]`` of callables long enough for the highest degree.
    """
    derivs = {}
    for _, p in T.terms:
        for j in range(len(p)):
            if j not in derivs:
                derivs[j] = _derivative_evaluator(f, j)

    def apply(x):
        xx = np.asarray(x, dtype=complex)
        out = np.zeros(xx.shape, dtype=complex)
        for s, p in T.terms:
            for j, c in enumerate(p):
                if c != 0:
                    out = out + c * np.asarray(derivs[j](xx + s))
        return complex(out) if xx.ndim == 0 else out

    return apply


class ConvolutionSymbol(Symbol):
    """``phi(z) = int_a^b e^{-z x} u(x) dx`` for a kernel supported on ``[a, b]``.

    ``u`` is either a callable (integrated by composite Gauss-Legendre, with
    the panel count growing with ``|z|``) or a pair ``(x, samples)`` on a
    uniform grid spanning ``[a, b]`` (trapezoid rule).
    """

    def __init__(self, u, support: Tuple[float, float], text: str = "<convolution symbol>"):
        a, b = map(float, support)
        if not a < b:
            raise BadRange("support must be a non-empty interval")
        self.a, self.b = a, b
        self.text = text
        if callable(u):
            self.u = u
            self.samples = None
        else:
            xs, us = (np.asarray(v) for v in u)
            self.u = None
            self.samples = (xs.astype(float), us.astype(complex))

    def _nodes(self, zmax: float):
        if self.samples is not None:
            xs, us = self.samples
            w = np.full(len(xs), xs[1] - xs[0])
            w[0] *= 0.5
            w[-1] *= 0.5
            return xs, w * us
        L = self.b - self.a
        panels = 4 + int(np.ceil(zmax * L / 4))
        edges = np.linspace(self.a, self.b, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * L / panels
        xs = (mid[:, None] + half * _gl_x[None, :]).ravel()
        w = np.tile(half * _gl_w, panels)
        return xs, w * np.asarray(self.u(xs), dtype=complex)

    def derivative(self, j, z):
        zz = np.asarray(z, dtype=complex)
        xs, wu = self._nodes(float(np.abs(zz).max(initial=0.0)))
        vals = np.exp(-np.multiply.outer(zz, xs)) @ (wu * (-xs) ** j)
        return complex(vals) if zz.ndim == 0 else vals

    def _eval(self, z):
        return self.derivative(0, z)

    def taylor(self, n, center=0.0):
        if center != 0:
            return super().taylor(n, center)
        xs, wu = self._nodes(float(n))
        k = np.arange(n)
        moments = ((-xs)[None, :] ** k[:, None]) @ wu
        return moments / np.exp(_lgamma_vec(k + 1))


def convolution_to_symbol(u, support: Tuple[float, float]) -> ConvolutionSymbol:
    """Symbol of the convolution operator ``f -> u * f`` for compactly supported ``u``.

    ``phi(z) = int e^{-z x} u(x) dx`` and ``phi(d/dx) e^{lam x} = (u * e^{lam .})(x)``.

    Examples
    --------
    >>> phi = convolution_to_symbol(lambda x: np.ones_like(x), (-1.0, 0.0))
    >>> abs(phi(1.0) - (np.e - 1)) < 1e-12
    True
    """
    return ConvolutionSymbol(u, support)


def convolve_direct(u: Callable, support: Tuple[float, float], f: Callable, x, panels: int = 32):
    """``(u * f)(x) = int u(y) f(x - y) dy`` by Gauss-Legendre; an independent reference."""
    a, b = support
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (b - a) / panels
    ys = (mid[:, None] + half * _gl_x[None, :]).ravel()
    w = np.tile(half * _gl_w, panels) * np.asarray(u(ys), dtype=complex)
    xx = np.asarray(x, dtype=complex)
    return np.asarray(f(np.subtract.outer(xx, ys))) @ w


def series_apply(a: Sequence[complex], f_taylor: np.ndarray, x) -> np.ndarray:
    """``sum_k a_k f^(k)(x)`` from the Taylor coefficients of ``f`` about 0.

    With ``f = sum_n b_n x^n``, ``f^(k)(x) = sum_n b_n n!/(n-k)! x^(n-k)``.
    Used to compute residuals without passing through ``phi / phi``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(f_taylor, dtype=complex)
    N = len(b)
    xx = np.asarray(x, dtype=complex)
    out = np.zeros(xx.shape, dtype=complex)
    n = np.arange(N)
    logfact = _lgamma_vec(n + 1)
    for k, ak in enumerate(a[:N]):
        if ak == 0:
            continue
        # coefficients of f^(k): b_n n!/(n-k)!, n >= k
        d = b[k:] * np.exp(logfact[k:] - logfact[: N - k])
        out = out + ak * np.polynomial.polynomial.polyval(xx, d)
    return out


__all__ = [
    "apply_symbol", "partial_sum_apply", "PartialSum", "fourier_multiplier_apply",
    "TranslationDifferentialForm", "translate_apply", "ExpPolySymbol",
    "ConvolutionSymbol", "convolution_to_symbol", "convolve_direct", "series_apply",
]
