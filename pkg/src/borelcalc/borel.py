"""The Borel transform, from Taylor data, closed forms or Laplace integrals, and its inverse."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import BadRange, NoDecay, NonConvergence, OutsideDomain
from .expfun import ContourFunction, ExpPoly, SpectralMeasure, TaylorRep, _lgamma_vec
from .numerics import DEFAULT_TOL, Circle, _gl_w, _gl_x

SERIES_TERMS = 128
LAPLACE_FLOOR = 1e-14
LAPLACE_MAX_PANELS = 20000


@dataclass(frozen=True)
class RationalForm:
    """``sum_j c_j / (zeta - pole_j)^order_j``, kept as a pole list."""

    terms: Tuple[Tuple[complex, int, complex], ...]

    def __call__(self, zeta):
        z = np.asarray(zeta, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for pole, order, c in self.terms:
            out = out + c / (z - pole) ** order
        return complex(out) if z.ndim == 0 else out

    @property
    def poles(self) -> np.ndarray:
        return np.array(sorted({t[0] for t in self.terms}, key=lambda p: (p.real, p.imag)), dtype=complex)


@dataclass(frozen=True)
class BorelRep:
    """A Borel transform: an evaluator trusted for ``|zeta| > valid_radius``."""

    evaluator: Callable
    valid_radius: float
    closed_form: Optional[RationalForm] = None

    def __call__(self, zeta):
        return self.evaluator(zeta)


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    est_error: float
    terms: int


def _series_terms(f: TaylorRep, z: np.ndarray, K: int) -> np.ndarray:
    K = min(K, f.K)
    b = f.b[:K]
    k = np.arange(K)
    nz = b != 0
    logc = np.zeros(K, dtype=complex)
    logc[nz] = np.log(b[nz]) + _lgamma_vec(k[nz] + 1)
    t = np.exp(logc[None, :] - (k + 1)[None, :] * np.log(z)[:, None])
    t[:, ~nz] = 0.0
    return t


def _tail(f: TaylorRep, z: np.ndarray, terms: np.ndarray) -> np.ndarray:
    q = f.tau / np.abs(z)
    t = np.abs(terms[:, -8:]).max(axis=1)
    return np.where(q > 0, t * q / (1 - q), 0.0)


def borel_series(f: TaylorRep, zeta, K: int = SERIES_TERMS, tol: float = 1e-10) -> SeriesValue:
    """``sum_{k<K} k! b_k / zeta^(k+1)`` with a geometric tail estimate.

    The tail is estimated as ``t * q / (1 - q)`` where ``t`` is the largest
    of the last eight terms and ``q = tau / |zeta|``.

    Raises
    ------
    OutsideDomain
        ``|zeta| <= tau``.
    NonConvergence
        The tail estimate is not below ``tol * max(1, |value|)``.
    """
    zeta = complex(zeta)
    if abs(zeta) <= f.tau:
        raise OutsideDomain(f"|zeta| = {abs(zeta):.6g} does not exceed the type bound {f.tau:.6g}")
    z = np.array([zeta])
    terms = _series_terms(f, z, K)
    value = complex(terms.sum())
    est = float(_tail(f, z, terms)[0])
    if est >= tol * max(1.0, abs(value)):
        raise NonConvergence(f"Borel series tail estimate {est:.3e} exceeds tolerance at zeta = {zeta}")
    return SeriesValue(value, est, terms.shape[1])


def borel_taylor(f: TaylorRep, K: int = SERIES_TERMS, tol: float = 1e-10) -> BorelRep:
    """:func:`borel_series` as a vectorised :class:`BorelRep` (same checks, all points at once)."""

    def ev(zeta):
        z = np.asarray(zeta, dtype=complex)
        zz = z.ravel()
        if np.any(np.abs(zz) <= f.tau):
            raise OutsideDomain(f"Borel series evaluated inside the type disk |zeta| <= {f.tau:.6g}")
        terms = _series_terms(f, zz, K)
        out = terms.sum(axis=1)
        if np.any(_tail(f, zz, terms) >= tol * np.maximum(1.0, np.abs(out))):
            raise NonConvergence("Borel series tail estimate exceeds tolerance on part of the contour")
        return complex(out[0]) if z.ndim == 0 else out.reshape(z.shape)

    return BorelRep(ev, f.tau)


def borel_exppoly(f: ExpPoly) -> BorelRep:
    """Closed form from ``B(x^m e^{lam x}) = m! / (zeta - lam)^(m+1)``.

    Examples
    --------
    >>> B = borel_exppoly(ExpPoly.from_atoms([(1, [1])]))
    >>> B(3.0)
    (0.5+0j)
    """
    terms = []
    for lam, p in f.atoms:
        for m, c in enumerate(p):
            if c != 0:
                terms.append((complex(lam), m + 1, complex(c) * factorial(m)))
    form = RationalForm(tuple(terms))
    return BorelRep(form, f.type, form)


def borel_laplace(f: Callable, theta: float, zeta, floor: float = LAPLACE_FLOOR,
                  max_panels: int = LAPLACE_MAX_PANELS) -> complex:
    """Borel transform as a Laplace integral along the ray ``arg x = theta``.

    Computes ``w * int_0^T f(t w) exp(-zeta w t) dt`` with ``w = e^{i theta}``,
    using Gauss-Legendre panels of width 1.  ``T`` is the end of the first
    two consecutive panels on which the integrand stays below ``floor``.
    The integral converges when ``Re(zeta w)`` exceeds the growth rate of
    ``f`` along the ray.  The choice ``theta = -arg(zeta)`` gives the kernel
    ``exp(-|zeta| t)``.

    Raises
    ------
    NoDecay
        The integrand has not decayed below ``floor`` within ``max_panels``.
    """
    zeta = complex(zeta)
    w = np.exp(1j * theta)
    s = 0.5 * (_gl_x + 1.0)
    wt = 0.5 * _gl_w
    total = 0.0 + 0.0j
    quiet = 0
    first = None
    for j in range(max_panels):
        t = j + s
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(f(t * w), dtype=complex) * np.exp(-zeta * w * t)
        if not np.all(np.isfinite(vals)):
            raise NoDecay(f"Laplace integrand overflowed at t ~ {j}: no decay along theta = {theta}")
        total += np.dot(wt, vals)
        env = float(np.abs(vals).max())
        first = env if first is None else first
        if j >= 256 and env >= 0.9 * first:
            raise NoDecay(f"Laplace integrand is not decaying along theta = {theta} at zeta = {zeta}")
        quiet = quiet + 1 if env < floor else 0
        if quiet >= 2:
            return complex(w * total)
    raise NoDecay(f"Laplace integrand did not decay below {floor:g} within t = {max_panels}")


def inverse_borel(B, R: float, x, tol: float = DEFAULT_TOL, nodes: int = 64):
    """``1/(2 pi i) \\oint_{|zeta|=R} exp(x zeta) B(zeta) dzeta``."""
    vr = getattr(B, "valid_radius", 0.0)
    if not R > vr:
        raise OutsideDomain(f"radius {R} must exceed the valid radius {vr} of the Borel transform")
    return ContourFunction(B, Circle(0.0, R, nodes), tol)(x)


def spectral_measure_from_borel(B: BorelRep, R: float) -> SpectralMeasure:
    """Measure on ``|zeta| = R`` with density ``B(R e^{i theta}) R e^{i theta} / (2 pi)``."""
    if not R > B.valid_radius:
        raise OutsideDomain(f"radius {R} must exceed the valid radius {B.valid_radius}")
    return SpectralMeasure(R, B, B.valid_radius)


def laurent_constant(B, r: float, nodes: int = 256) -> float:
    """``max |zeta B(zeta)|`` on ``|zeta| = r``; bounds ``|B| <= C/|zeta|`` beyond ``r``."""
    if not r > 0:
        raise BadRange("radius must be positive")
    z = r * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    return float(np.abs(z * B(z)).max())


__all__ = [
    "BorelRep", "RationalForm", "SeriesValue", "borel_series", "borel_taylor",
    "borel_exppoly", "borel_laplace", "inverse_borel", "spectral_measure_from_borel",
    "laurent_constant",
]
