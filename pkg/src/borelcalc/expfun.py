"""Functions of exponential type and the carriers that generate them.

Four representations are used throughout the package:

``ExpPoly``
    finite sums ``sum_k p_k(x) exp(zeta_k x)``, represented exactly;
``TaylorRep``
    a prefix of Taylor coefficients ``b_k`` plus a declared type bound;
``AtomicDistribution``
    the finite distribution ``sum_k p_k(-d/dxi) delta_{zeta_k}`` whose pairing
    with ``exp(x zeta)`` is the matching exponential polynomial;
``SpectralMeasure`` / ``ContourFunction``
    a density on a closed curve, ``f(x) = 1/(2 pi i) \\oint exp(x zeta) H(zeta) dzeta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma
from typing import Callable, Tuple, Union

import numpy as np

from .errors import BadRange, TruncationError
from .numerics import DEFAULT_TOL, Circle, Contour, contour_integrate

TAYLOR_PREFIX = 128
TAIL_TOL = 1e-12
_X_BLOCK = 64


def _trim(coeffs) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    nz = np.nonzero(c)[0]
    return c[: nz[-1] + 1] if len(nz) else c[:0]


@dataclass(frozen=True, eq=False)
class ExpPoly:
    """Exponential polynomial ``sum_k p_k(x) exp(zeta_k x)``.

    ``atoms`` is a tuple of ``(zeta, coeffs)`` pairs with ``coeffs`` the
    ascending-power coefficients of ``p_k``.  Use :meth:`from_atoms` to build
    one from loose data: it merges repeated exponents and drops zero terms.

    Examples
    --------
    >>> f = ExpPoly.from_atoms([(1j, [0.5]), (-1j, [0.5])])   # cos x
    >>> round(f(0.0).real, 12)
    1.0
    """

    atoms: Tuple[Tuple[complex, np.ndarray], ...] = ()

    @classmethod
    def from_atoms(cls, atoms) -> "ExpPoly":
        merged: dict = {}
        for zeta, poly in atoms:
            zeta = complex(zeta)
            p = np.atleast_1d(np.asarray(poly, dtype=complex))
            if zeta in merged:
                q = merged[zeta]
                n = max(len(p), len(q))
                p = np.pad(p, (0, n - len(p))) + np.pad(q, (0, n - len(q)))
            merged[zeta] = p
        out = tuple((z, _trim(p)) for z, p in merged.items() if len(_trim(p)))
        return cls(out)

    @classmethod
    def constant(cls, c=1.0) -> "ExpPoly":
        return cls.from_atoms([(0.0, [c])])

    @property
    def zetas(self) -> np.ndarray:
        return np.array([z for z, _ in self.atoms], dtype=complex)

    @property
    def type(self) -> float:
        return float(np.abs(self.zetas).max()) if self.atoms else 0.0

    def __call__(self, x):
        xx = np.asarray(x, dtype=complex)
        out = np.zeros(xx.shape, dtype=complex)
        for zeta, p in self.atoms:
            out = out + np.polynomial.polynomial.polyval(xx, p) * np.exp(zeta * xx)
        return complex(out) if xx.ndim == 0 else out

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        return ExpPoly.from_atoms(list(self.atoms) + list(other.atoms))

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        return self + other.scale(-1.0)

    def scale(self, c: complex) -> "ExpPoly":
        return ExpPoly.from_atoms([(z, c * p) for z, p in self.atoms])

    def derivative(self) -> "ExpPoly":
        """d/dx, exactly: (p e^{zx})' = (p' + z p) e^{zx}."""
        atoms = []
        for zeta, p in self.atoms:
            dp = np.polynomial.polynomial.polyder(p) if len(p) > 1 else np.zeros(1)
            q = zeta * p
            q[: len(dp)] += dp
            atoms.append((zeta, q))
        return ExpPoly.from_atoms(atoms)

    def taylor(self, n: int = TAYLOR_PREFIX) -> np.ndarray:
        """Taylor coefficients ``b_0 .. b_{n-1}`` about 0."""
        k = np.arange(n)
        b = np.zeros(n, dtype=complex)
        for zeta, p in self.atoms:
            # exp(zeta x) has coefficients zeta^m / m!
            e = np.exp(k * np.log(zeta) - _lgamma_vec(k + 1)) if zeta != 0 else (k == 0).astype(complex)
            for j, c in enumerate(p):
                if j < n:
                    b[j:] += c * e[: n - j]
        return b

    def to_taylor(self, n: int = TAYLOR_PREFIX) -> "TaylorRep":
        return TaylorRep(self.taylor(n), self.type)

    def allclose(self, other: "ExpPoly", tol: float = 1e-12) -> bool:
        return coefficient_error(self, other) < tol


def coefficient_error(f: ExpPoly, g: ExpPoly, match_tol: float = 1e-9) -> float:
    """Largest coefficient difference between two exponential polynomials.

    Exponents closer than ``match_tol`` are identified; unmatched atoms count
    with their full coefficient size.
    """
    err = 0.0
    used = set()
    for zeta, p in f.atoms:
        q = np.zeros(0, dtype=complex)
        for i, (w, qq) in enumerate(g.atoms):
            if i not in used and abs(w - zeta) < match_tol:
                q = qq
                used.add(i)
                break
        n = max(len(p), len(q))
        err = max(err, float(np.abs(np.pad(p, (0, n - len(p))) - np.pad(q, (0, n - len(q)))).max()))
    for i, (w, qq) in enumerate(g.atoms):
        if i not in used:
            err = max(err, float(np.abs(qq).max()))
    return err


def _lgamma_vec(k):
    return np.array([lgamma(float(v)) for v in np.atleast_1d(k)])


@dataclass(frozen=True, eq=False)
class TaylorRep:
    """Taylor prefix ``b_0 .. b_{K-1}`` of an entire function of type at most ``tau``."""

    b: np.ndarray
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "b", np.atleast_1d(np.asarray(self.b, dtype=complex)))
        if not self.tau >= 0:
            raise BadRange("type bound tau must be >= 0")
        if len(self.b) == 0:
            raise BadRange("need at least one Taylor coefficient")

    @property
    def K(self) -> int:
        return len(self.b)

    def tail_constant(self) -> float:
        """``C`` in ``|b_k| <= C tau^k / k!``, fitted on the last quarter of the prefix."""
        if self.tau == 0:
            return 0.0
        k = np.arange(self.K)
        sel = k >= 3 * self.K // 4
        with np.errstate(divide="ignore"):
            logs = np.log(np.abs(self.b[sel])) + _lgamma_vec(k[sel] + 1) - k[sel] * np.log(self.tau)
        logs = logs[np.isfinite(logs)]
        return float(np.exp(logs.max())) if len(logs) else 0.0

    def tail_bound(self, r: float) -> float:
        """Bound on ``sum_{k >= K} |b_k| r^k`` from a Stirling-type estimate."""
        C = self.tail_constant()
        if C == 0 or r == 0:
            return 0.0
        t = self.tau * r
        K = self.K
        if t >= K + 1:
            return np.inf
        lead = K * np.log(t) - lgamma(K + 1)
        return float(C * np.exp(lead) / (1 - t / (K + 1)))

    def eval_radius(self, tol: float = TAIL_TOL) -> float:
        """Largest ``r`` with ``tail_bound(r) < tol``."""
        if self.tail_constant() == 0:
            return np.inf
        lo, hi = 0.0, (self.K + 1) / self.tau
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.tail_bound(mid) < tol:
                lo = mid
            else:
                hi = mid
        return lo

    def __call__(self, x, tol: float = TAIL_TOL):
        xx = np.asarray(x, dtype=complex)
        r = self.eval_radius(tol)
        if np.any(np.abs(xx) > r):
            raise TruncationError(
                f"|x| = {float(np.abs(xx).max()):.4g} exceeds the radius {r:.4g} where "
                f"the truncated series is accurate to {tol:g}")
        out = np.polynomial.polynomial.polyval(xx, self.b)
        return complex(out) if xx.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class AtomicDistribution:
    """``sum_k p_k(-d/dxi) delta_{zeta_k}``; ``weight_poly`` ascending coefficients of ``p_k``."""

    atoms: Tuple[Tuple[complex, np.ndarray], ...] = ()

    def to_exppoly(self) -> ExpPoly:
        return ExpPoly.from_atoms(self.atoms)


@dataclass(frozen=True, eq=False)
class ContourFunction:
    """``f(x) = 1/(2 pi i) \\oint_contour exp(x zeta) H(zeta) dzeta``.

    ``H`` must be holomorphic on and outside the contour up to the singular
    set it encloses; ``f`` is then entire of exponential type.
    """

    H: Callable
    contour: Contour
    tol: float = DEFAULT_TOL

    def __call__(self, x):
        return self.derivative(0, x)

    def derivative(self, j: int, x):
        """``f^(j)(x)``: the contour integral with an extra factor ``zeta^j``."""
        xx = np.atleast_1d(np.asarray(x, dtype=complex)).ravel()
        out = np.empty(len(xx), dtype=complex)
        for s in range(0, len(xx), _X_BLOCK):
            blk = xx[s:s + _X_BLOCK]

            def integrand(z, blk=blk):
                return (z ** j * self.H(z))[:, None] * np.exp(np.outer(z, blk))

            out[s:s + _X_BLOCK] = contour_integrate(integrand, self.contour, self.tol).value
        return complex(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))

    def taylor(self, n: int) -> np.ndarray:
        """``b_k = m_k / k!`` with moments ``m_k = 1/(2 pi i) \\oint zeta^k H dzeta``."""
        k = np.arange(n)

        def integrand(z):
            return (self.H(z))[:, None] * z[:, None] ** k[None, :]

        m = np.atleast_1d(contour_integrate(integrand, self.contour, self.tol).value)
        return m / np.exp(_lgamma_vec(k + 1))


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Measure on ``|zeta| = radius`` with density ``B(R e^{i theta}) R e^{i theta} / (2 pi)``."""

    radius: float
    borel: Callable
    tau: float = 0.0
    nodes: int = 64

    def __post_init__(self):
        if not self.radius > self.tau:
            raise BadRange(f"radius {self.radius} must exceed the type bound {self.tau}")

    def density(self, theta):
        u = self.radius * np.exp(1j * np.asarray(theta, dtype=float))
        return self.borel(u) * u / (2 * np.pi)

    @property
    def contour(self) -> Circle:
        return Circle(0.0, self.radius, self.nodes)

    def as_function(self, tol: float = DEFAULT_TOL) -> ContourFunction:
        return ContourFunction(self.borel, self.contour, tol)


ExpFunction = Union[ExpPoly, TaylorRep, ContourFunction]


def exp_type_estimate(f, K: int = TAYLOR_PREFIX) -> float:
    """Numerical proxy for the exponential type: ``max_{8<=k<=K} (k! |b_k|)^(1/k)``.

    Examples
    --------
    >>> from borelcalc.expfun import ExpPoly
    >>> round(exp_type_estimate(ExpPoly.from_atoms([(2, [1])]).to_taylor(), 64), 6)
    2.0
    """
    b = f.b if isinstance(f, TaylorRep) else np.asarray(f, dtype=complex)
    K = min(K, len(b) - 1)
    if K < 8:
        raise BadRange("need at least 9 Taylor coefficients (k = 0..8)")
    k = np.arange(8, K + 1)
    mag = np.abs(b[8:K + 1])
    nz = mag > 0
    if not np.any(nz):
        return 0.0
    vals = np.exp((_lgamma_vec(k[nz] + 1) + np.log(mag[nz])) / k[nz])
    return float(vals.max())


def evaluate(f, x):
    """Pointwise value of any of the exponential-type representations."""
    if isinstance(f, AtomicDistribution):
        f = f.to_exppoly()
    if isinstance(f, SpectralMeasure):
        f = f.as_function()
    return f(x)


def to_atomic(f: ExpPoly) -> AtomicDistribution:
    """Atom-for-atom translation ``p_k e^{zeta_k x} -> p_k(-d/dxi) delta_{zeta_k}``."""
    return AtomicDistribution(tuple((z, p.copy()) for z, p in f.atoms))


def p_transform(d, x, tol: float = DEFAULT_TOL):
    """Pair ``exp(x zeta)`` with an atomic distribution or a spectral measure.

    Atomic distributions are summed exactly; spectral measures are integrated
    by trapezoid quadrature on their circle.
    """
    if isinstance(d, AtomicDistribution):
        return d.to_exppoly()(x)
    if isinstance(d, SpectralMeasure):
        return d.as_function(tol)(x)
    raise TypeError(f"cannot pair exp(x zeta) with {type(d).__name__}")
