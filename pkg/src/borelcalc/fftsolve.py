"""Solving ``phi(d/dx) f = g`` from uniformly sampled data.

Measured data only gives the Borel transform of ``g`` through one-sided
Laplace integrals along the real axis, i.e. on half-planes
``Re zeta > X_+`` and ``Re zeta < X_-``.  When ``|phi|`` is bounded below on
a vertical strip (apart from a compact band) the particular solution can be
assembled from two weighted Fourier transforms; this module provides the
abscissa estimate, the strip check, the FFT solver and the rectangle-contour
variant for band-limited data.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy.optimize import minimize, minimize_scalar
from scipy.special import erfc

from .errors import (BadRange, FormatError, StripViolation, TailTooShort, ZeroOnContour)
from .numerics import polygon_integrate, segment_rule
from .symbols import make_symbol

log = logging.getLogger(__name__)

ABSCISSA_CLAMP = 50.0
STRIP_FLOOR = 1e-6
PAD_FACTOR = 4
_FD1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Samples ``values[j] = g(x0 + j*dx)``."""

    x0: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.values, dtype=complex))
        object.__setattr__(self, "values", v)
        if not self.dx > 0:
            raise BadRange("dx must be positive")
        if len(v) < 16:
            raise BadRange(f"need at least 16 samples, got {len(v)}")
        if not np.all(np.isfinite(v)):
            raise BadRange("samples must be finite")

    @classmethod
    def from_function(cls, g: Callable, a: float, b: float, dx: float) -> "SampledSignal":
        n = int(round((b - a) / dx)) + 1
        x = a + dx * np.arange(n)
        return cls(a, dx, np.asarray(g(x), dtype=complex))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "re", "im"])
            for xi, v in zip(self.x, self.values):
                w.writerow([format(xi, ".17g"), format(v.real, ".17g"), format(v.imag, ".17g")])

    @classmethod
    def from_csv(cls, path) -> "SampledSignal":
        try:
            with open(path, newline="") as fh:
                rows = list(csv.reader(fh))
        except OSError as exc:
            raise FormatError(f"cannot read samples file: {exc}") from exc
        if not rows or [h.strip() for h in rows[0]] != ["x", "re", "im"]:
            raise FormatError("samples CSV must start with the header x,re,im")
        try:
            data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
        except ValueError as exc:
            raise FormatError(f"non-numeric entry in samples CSV: {exc}") from exc
        if data.ndim != 2 or data.shape[1] != 3 or len(data) < 16:
            raise FormatError("samples CSV needs at least 16 rows of x,re,im")
        x = data[:, 0]
        d = np.diff(x)
        if np.any(d <= 0):
            raise FormatError("x must be strictly increasing")
        dx = (x[-1] - x[0]) / (len(x) - 1)
        if np.max(np.abs(d - dx)) > 1e-9 * max(abs(dx), np.max(np.abs(x))):
            raise FormatError("x must be uniformly spaced")
        return cls(float(x[0]), float(dx), data[:, 1] + 1j * data[:, 2])


@dataclass(frozen=True)
class DecayAbscissas:
    X_plus: float
    X_minus: float
    warnings: Tuple[str, ...] = ()


def _envelope(a: np.ndarray, width: int = 8) -> np.ndarray:
    # running max over windows of `width` samples
    n = len(a) - width + 1
    idx = np.arange(width)[None, :] + np.arange(n)[:, None]
    return a[idx].max(axis=1)


def _tail_slope(x: np.ndarray, a: np.ndarray) -> Optional[float]:
    env = _envelope(a)
    xe = x[: len(env)] + 0.5 * (x[1] - x[0]) * 7
    ok = env > 0
    if ok.sum() < 8:
        return None
    return float(np.polyfit(xe[ok], np.log(env[ok]), 1)[0])


def estimate_decay_abscissas(g: SampledSignal) -> DecayAbscissas:
    """Growth rates of ``|g|`` on the outer quarters of the window.

    ``X_plus`` is the slope of a least-squares fit of the log-envelope on the
    right tail; ``X_minus`` the same on the left tail (for ``|g| ~ e^{a x}``
    as ``x -> -inf`` that slope is ``a``).  Both are clamped to [-50, 50]; an
    all-zero tail is reported at the clamp with a warning.

    Raises
    ------
    TailTooShort
        A tail has fewer than 32 samples.
    """
    n = g.n
    q = n // 4
    if q < 32:
        raise TailTooShort(f"each tail needs >= 32 samples, got {q}")
    x, a = g.x, np.abs(g.values)
    warnings = []
    right = _tail_slope(x[-q:], a[-q:])
    left = _tail_slope(x[:q], a[:q])
    if right is None:
        warnings.append("right tail is zero; X_plus clamped")
        right = -ABSCISSA_CLAMP
    if left is None:
        warnings.append("left tail is zero; X_minus clamped")
        left = ABSCISSA_CLAMP
    c = ABSCISSA_CLAMP
    return DecayAbscissas(float(np.clip(right, -c, c)), float(np.clip(left, -c, c)), tuple(warnings))


@dataclass(frozen=True)
class StripCheck:
    epsilon: float
    argmin: complex


def strip_min_check(phi, xi_minus: float, xi_plus: float, Y0: float, Y_max: float = 200.0,
                    step: float = 0.05, n_xi: int = 33, refine: int = 16,
                    floor: float = STRIP_FLOOR) -> StripCheck:
    """Minimum of ``|phi(xi + i eta)|`` for ``xi in [xi_-, xi_+]``, ``Y0 <= |eta| <= Y_max``.

    A grid of ``n_xi`` values of ``xi`` by ``eta`` spacing ``step`` is scanned,
    then the ``refine`` lowest local minima (in ``eta``) are polished by a
    bounded minimisation of ``|phi|^2``, so that isolated zeros between grid
    lines are not missed.

    Raises
    ------
    StripViolation
        The minimum is below ``floor``.
    """
    phi = make_symbol(phi)
    if not xi_minus <= xi_plus:
        raise BadRange("need xi_minus <= xi_plus")
    if not Y_max > Y0 >= 0:
        raise BadRange("need Y_max > Y0 >= 0")
    xi = np.linspace(xi_minus, xi_plus, n_xi)
    m = int(np.ceil((Y_max - Y0) / step)) + 1
    eta_pos = np.linspace(Y0, Y_max, m)
    best_val, best_z = np.inf, None
    for sign in (1.0, -1.0):
        eta = sign * eta_pos
        vals = np.abs(phi(xi[:, None] + 1j * eta[None, :]))
        col = vals.min(axis=0)
        k = int(np.argmin(col))
        if col[k] < best_val:
            best_val = float(col[k])
            best_z = complex(xi[int(np.argmin(vals[:, k]))], eta[k])
        interior = np.nonzero((col[1:-1] <= col[:-2]) & (col[1:-1] <= col[2:]))[0] + 1
        cand = sorted(interior, key=lambda i: col[i])[:refine]
        lo, hi = sorted((sign * Y0, sign * Y_max))
        for i in cand:
            j = int(np.argmin(vals[:, i]))
            z, v = _polish_min(phi, xi[j], eta[i], (xi_minus, xi_plus), (lo, hi))
            if v < best_val:
                best_val, best_z = v, z
    if best_val < floor:
        raise StripViolation(
            f"|phi| reaches {best_val:.3e} at {best_z:.6g} inside the strip; "
            f"shift xi_- / xi_+ away from the zero line")
    return StripCheck(best_val, best_z)


def _polish_min(phi, xi0, eta0, xb, eb):
    def obj(v):
        return float(abs(complex(phi(complex(v[0], v[1])))) ** 2)

    res = minimize(obj, np.array([xi0, eta0]), method="L-BFGS-B", bounds=[xb, eb],
                   options={"ftol": 1e-30, "gtol": 1e-20, "maxiter": 200})
    z = complex(res.x[0], res.x[1])
    return z, float(abs(complex(phi(z))))


@dataclass(frozen=True)
class StripConfig:
    X_plus: float
    X_minus: float
    xi_plus: float
    xi_minus: float
    Y0: float
    epsilon: float
    Y_max: float = 200.0

    def __post_init__(self):
        if not self.xi_minus < self.xi_plus:
            raise BadRange("need xi_minus < xi_plus")
        if not self.xi_plus > self.X_plus:
            raise BadRange(f"xi_plus = {self.xi_plus} must exceed X_plus = {self.X_plus}")
        if not self.xi_minus < self.X_minus:
            raise BadRange(f"xi_minus = {self.xi_minus} must be below X_minus = {self.X_minus}")


def make_strip_config(phi, g: SampledSignal, xi_minus: Optional[float] = None,
                      xi_plus: Optional[float] = None, Y0: float = 2.0,
                      Y_max: Optional[float] = None, margin: float = 0.25) -> StripConfig:
    """Estimate the abscissas of ``g``, pick the strip (unless given) and check it.

    The default ``Y_max`` covers the discrete frequency range of the padded
    transform, ``max(200, 2 pi * 4 / dx)``.
    """
    ab = estimate_decay_abscissas(g)
    xp = ab.X_plus + margin if xi_plus is None else xi_plus
    xm = ab.X_minus - margin if xi_minus is None else xi_minus
    Ym = max(200.0, 2 * np.pi * 4 / g.dx) if Y_max is None else Y_max
    chk = strip_min_check(phi, xm, xp, Y0, Ym)
    return StripConfig(ab.X_plus, ab.X_minus, xp, xm, Y0, chk.epsilon, Ym)


@dataclass(frozen=True, eq=False)
class FFTSolution:
    signal: SampledSignal
    warnings: Tuple[str, ...] = ()


def fft_solve(phi, g: SampledSignal, cfg: StripConfig, pad: int = PAD_FACTOR) -> FFTSolution:
    """Particular solution from two exponentially weighted Fourier transforms.

    ``g`` is split at ``x = 0`` (a sample at 0 goes half to each side).  The
    right part is weighted by ``e^{-xi_+ x}``, transformed, divided by
    ``phi(xi_+ + i s)``, transformed back and re-weighted by ``e^{xi_+ x}``;
    the left part likewise with ``xi_-``.  The data is zero-padded to
    ``pad`` times its length and the result is returned on the central half
    of the padded grid.

    Raises
    ------
    StripViolation
        ``phi`` (nearly) vanishes on one of the lines ``Re zeta = xi_+-``.
    """
    phi = make_symbol(phi)
    n = g.n
    N = pad * n
    off = (N - n) // 2
    xp = g.x0 + g.dx * (np.arange(N) - off)
    data = np.zeros(N, dtype=complex)
    data[off:off + n] = g.values
    at0 = np.abs(xp) < 1e-9 * g.dx
    right = np.where(xp > 0, 1.0, 0.0) + 0.5 * at0
    left = np.where(xp < 0, 1.0, 0.0) + 0.5 * at0
    s = 2 * np.pi * np.fft.fftfreq(N, g.dx)
    warnings = []

    lo, hi = N // 2 - N // 4, N // 2 + N // 4
    xo = xp[lo:hi]
    lim = np.log(1e300)
    keep = (np.abs(xo * cfg.xi_plus) < lim) & (np.abs(xo * cfg.xi_minus) < lim)
    if not np.all(keep):
        warnings.append("output window shrunk: exp(x xi) would exceed 1e300")
        log.warning(warnings[-1])

    out = np.zeros(N, dtype=complex)
    for xi, mask in ((cfg.xi_plus, right), (cfg.xi_minus, left)):
        den = phi(xi + 1j * s)
        if np.min(np.abs(den)) < STRIP_FLOOR:
            raise StripViolation(f"phi nearly vanishes on the line Re zeta = {xi}")
        with np.errstate(over="ignore", under="ignore"):
            w = data * mask * np.exp(-xi * xp)
            h = np.fft.ifft(np.fft.fft(w) / den)
            out += np.exp(xi * xp) * h
    res = out[lo:hi][keep]
    x_start = xo[keep][0]
    return FFTSolution(SampledSignal(float(x_start), g.dx, res), tuple(warnings))


def fd_derivative(v: np.ndarray, dx: float, order: int = 1) -> np.ndarray:
    """Eighth-order central differences (the outer 4 samples per order are invalid)."""
    out = np.asarray(v, dtype=complex)
    for _ in range(order):
        d = np.zeros_like(out)
        d[4:-4] = np.convolve(out, _FD1[::-1], mode="valid") / dx
        out = d
    return out


def translation_residual(T, f: SampledSignal, g: Callable, interior: float = 0.5) -> float:
    """Relative L2 residual of ``sum_k p_k(d/dx) f(x + s_k) - g`` on the interior of ``f``'s window.

    Shifts must be real multiples of ``dx``; derivatives use eighth-order
    central differences.  ``interior`` is the fraction of the window kept.
    """
    n, dx = f.n, f.dx
    lhs = np.zeros(n, dtype=complex)
    valid = np.ones(n, dtype=bool)
    for s, p in T.terms:
        k = s.real / dx
        if abs(s.imag) > 0 or abs(k - round(k)) > 1e-9:
            raise BadRange("shifts must be real multiples of dx")
        k = int(round(k))
        for j, c in enumerate(p):
            if c == 0:
                continue
            d = fd_derivative(f.values, dx, j)
            shifted = np.zeros(n, dtype=complex)
            idx = np.arange(n) + k
            ok = (idx >= 4 * j) & (idx < n - 4 * j)
            shifted[ok] = d[idx[ok]]
            valid &= ok
            lhs += c * shifted
    x = f.x
    m = int(n * (1 - interior) / 2)
    sel = np.zeros(n, dtype=bool)
    sel[m:n - m] = True
    sel &= valid
    gv = np.asarray(g(x[sel]), dtype=complex)
    return float(np.linalg.norm(lhs[sel] - gv) / np.linalg.norm(gv))


# --- rectangle contour ------------------------------------------------------

def _filon_weights(zeta: np.ndarray, h: float):
    """Interior and endpoint factors for int_0^T q(t) e^{-zeta t} dt with q piecewise linear."""
    u = zeta * h
    small = np.abs(u) < 1e-3
    us = np.where(small, 1.0, u)
    interior = np.where(small, 1 + u ** 2 / 12 + u ** 4 / 360, (2 * np.cosh(us) - 2) / us ** 2)
    end = np.where(small, 0.5 - u / 6 + u ** 2 / 24 - u ** 3 / 120, (us - 1 + np.exp(-us)) / us ** 2)
    return h * interior, h * end


def erfc_window(t: np.ndarray, T: float, sigma: float = 1.5) -> np.ndarray:
    """Smooth cutoff ``1/2 erfc((|t| - Tc)/sigma)`` with ``Tc = T - 7 sigma``."""
    return 0.5 * erfc((np.abs(t) - (T - 7 * sigma)) / sigma)


class SampledBorel:
    """Borel transform of windowed samples through one-sided Laplace integrals.

    For ``Re zeta >= 0``: ``int_0^inf g_w(t) e^{-zeta t} dt``; for
    ``Re zeta < 0``: ``-int_{-inf}^0 g_w(t) e^{-zeta t} dt``.  ``g_w`` is the
    data times a smooth window vanishing at both ends; the integrals use
    piecewise-linear (Filon-type) weights, exact for the exponential factor.
    """

    _CHUNK = 128

    def __init__(self, g: SampledSignal, sigma: float = 1.5):
        x = g.x
        T = min(-x[0], x[-1])
        if T <= 7 * sigma + 1:
            raise BadRange("sample window too short for the smooth cutoff")
        at0 = np.abs(x) < 1e-9 * g.dx
        if not at0.any():
            raise BadRange("sample grid must contain x = 0")
        i0 = int(np.nonzero(at0)[0][0])
        w = erfc_window(x, T, sigma) * g.values
        self.h = g.dx
        self.right = w[i0:]            # t = 0, h, 2h, ...
        self.left = w[i0::-1]          # t = 0, -h, -2h, ...

    def _laplace(self, q: np.ndarray, zeta: np.ndarray) -> np.ndarray:
        # int_0^T q(t) e^{-zeta t} dt on t_j = j h
        wi, we = _filon_weights(zeta, self.h)
        j = np.arange(len(q))
        out = np.empty(len(zeta), dtype=complex)
        for s in range(0, len(zeta), self._CHUNK):
            z = zeta[s:s + self._CHUNK]
            with np.errstate(under="ignore"):
                E = np.exp(-np.outer(z * self.h, j))
            out[s:s + self._CHUNK] = E[:, 1:] @ q[1:] * wi[s:s + self._CHUNK] + q[0] * we[s:s + self._CHUNK]
        return out

    def __call__(self, zeta):
        z = np.atleast_1d(np.asarray(zeta, dtype=complex)).ravel()
        out = np.empty(len(z), dtype=complex)
        pos = z.real >= 0
        if pos.any():
            out[pos] = self._laplace(self.right, z[pos])
        if (~pos).any():
            # t -> -t: -int_0^inf g_w(-t) e^{zeta t} dt
            out[~pos] = -self._laplace(self.left, -z[~pos])
        return complex(out[0]) if np.ndim(zeta) == 0 else out.reshape(np.shape(zeta))


@dataclass(eq=False)
class BoxSolution:
    """``f(x) = 1/(2 pi i) \\oint_box exp(x zeta) B(g)(zeta)/phi(zeta) dzeta``."""

    phi: object
    borel: Callable
    xi_minus: float
    xi_plus: float
    Y: float
    tol: float = 1e-10
    _cache: Dict = field(default_factory=dict)

    @property
    def corners(self):
        a, b, y = self.xi_minus, self.xi_plus, self.Y
        return [complex(a, -y), complex(b, -y), complex(b, y), complex(a, y)]

    def _integrand(self, x):
        xx = np.atleast_1d(np.asarray(x, dtype=complex))

        def f(z):
            den = self.phi(z)
            if np.any(den == 0):
                raise ZeroOnContour("phi vanishes on the box boundary")
            return (self.borel(z) / den)[:, None] * np.exp(np.outer(z, xx))

        return f

    def __call__(self, x):
        val = polygon_integrate(self._integrand(x), self.corners, self.tol).value
        return np.asarray(val).reshape(np.shape(x)) if np.ndim(x) else complex(np.asarray(val).ravel()[0])

    def side_contributions(self, x, panels: Optional[int] = None) -> Dict[str, np.ndarray]:
        """The four side integrals separately (bottom, right, top, left)."""
        c = self.corners
        names = ("bottom", "right", "top", "left")
        out = {}
        f = self._integrand(x)
        for k, name in enumerate(names):
            a, b = c[k], c[(k + 1) % 4]
            p = panels or max(8, int(abs(b - a)))
            z, w = segment_rule(a, b, p)
            out[name] = (f(z) * w[:, None]).sum(axis=0) / (2j * np.pi)
        return out


def _side_min(phi, a: complex, b: complex, samples: int = 1024, polish: int = 4) -> float:
    # min |phi| on the segment a -> b: a dense scan, then bounded 1-d polishing
    t = np.linspace(0.0, 1.0, samples + 1)
    v = np.abs(phi(a + (b - a) * t))
    best = float(v.min())
    h = 1.0 / samples
    for i in np.argsort(v)[:polish]:
        res = minimize_scalar(lambda u: abs(complex(phi(a + (b - a) * u))),
                              bounds=(max(0.0, t[i] - h), min(1.0, t[i] + h)), method="bounded",
                              options={"xatol": 1e-14})
        best = min(best, float(res.fun))
    return best


def box_contour_solve(phi, g, Y: float, xi_minus: float = -1.0, xi_plus: float = 1.0,
                      tol: float = 1e-10) -> BoxSolution:
    """Particular solution by the rectangle contour with corners ``xi_+- +- iY``.

    ``g`` is a :class:`SampledSignal` of band-limited data (the Borel
    transform is then computed from windowed two-sided Laplace integrals) or
    anything callable as a Borel transform (e.g. a closed form).

    Raises
    ------
    ZeroOnContour
        ``phi`` is (nearly) zero on the box boundary.
    """
    phi = make_symbol(phi)
    if not Y > 0 or not xi_minus < 0 < xi_plus:
        raise BadRange("need Y > 0 and xi_minus < 0 < xi_plus")
    B = SampledBorel(g) if isinstance(g, SampledSignal) else g
    c = [complex(xi_minus, -Y), complex(xi_plus, -Y), complex(xi_plus, Y), complex(xi_minus, Y)]
    low = min(_side_min(phi, c[k], c[(k + 1) % 4]) for k in range(4))
    if low < STRIP_FLOOR:
        raise ZeroOnContour(f"|phi| drops to {low:.3e} on the box boundary")
    return BoxSolution(phi, B, xi_minus, xi_plus, Y, tol)


__all__ = [
    "SampledSignal", "DecayAbscissas", "estimate_decay_abscissas", "StripCheck", "strip_min_check",
    "StripConfig", "make_strip_config", "FFTSolution", "fft_solve", "fd_derivative",
    "translation_residual", "SampledBorel", "erfc_window", "BoxSolution", "box_contour_solve",
]
