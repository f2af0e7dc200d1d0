"""Zeros of entire symbols and density diagnostics for zero sets.

Zeros are located by the argument principle: boxes are subdivided until each
holds a single (possibly multiple) zero, whose position is read off from the
first moment of ``phi'/phi`` and polished by Newton's method.  The counting
functions ``n_Z`` and ``N_Z`` and the trend diagnostics work on explicit zero
lists, which need not come from a symbol.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (BadRange, CountMismatch, MaxDepth, NonConvergence, TooFewZeros,
                     ZeroAtOrigin, ZeroOnContour)
from .numerics import Circle, Rectangle, contour_integrate, polygon_integrate
from .symbols import make_symbol

COUNT_TOL = 1e-8
NEAR_ZERO_RTOL = 1e-8
MERGE_RADIUS = 1e-6
MAX_DEPTH = 40
_SPLITS = (0.5371, 0.4629, 0.5813, 0.4187, 0.5097)


@dataclass(frozen=True)
class Box:
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def corners(self):
        return [complex(self.x0, self.y0), complex(self.x1, self.y0),
                complex(self.x1, self.y1), complex(self.x0, self.y1)]

    @property
    def size(self) -> float:
        return max(self.x1 - self.x0, self.y1 - self.y0)

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (self.x0 - pad <= z.real <= self.x1 + pad) and (self.y0 - pad <= z.imag <= self.y1 + pad)

    def split(self, fx: float, fy: float):
        xm = self.x0 + fx * (self.x1 - self.x0)
        ym = self.y0 + fy * (self.y1 - self.y0)
        return [Box(self.x0, xm, self.y0, ym), Box(xm, self.x1, self.y0, ym),
                Box(self.x0, xm, ym, self.y1), Box(xm, self.x1, ym, self.y1)]


def _log_derivative(phi, scale: float, powers: Sequence[int] = (0,)):
    """Integrand ``zeta^p phi'/phi`` (one column per power) with a near-zero guard."""

    def integrand(z):
        f = phi(z)
        df = np.asarray(phi.derivative(1, z), dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = df / f
            newton = np.abs(f / df)
        near = (f == 0) | (newton < NEAR_ZERO_RTOL * scale)
        if np.any(near):
            raise ZeroOnContour(f"phi (nearly) vanishes on the contour near zeta = {z[near][0]:.6g}")
        if len(powers) == 1 and powers[0] == 0:
            return ratio
        return np.stack([ratio * z ** p for p in powers], axis=1)

    return integrand


def _round_count(v: complex) -> int:
    n = int(round(v.real))
    if abs(v - n) > 0.1:
        # a converged half-integer is the principal value across a zero on the contour
        if abs(v.imag) < 0.1 and abs(abs(v.real - np.floor(v.real)) - 0.5) < 0.1:
            raise ZeroOnContour(f"argument-principle integral {v:.6g} is a half-integer: "
                                "a zero lies on the contour")
        raise NonConvergence(f"argument-principle integral {v:.6g} is not close to an integer")
    return n


def count_zeros(phi, contour, tol: float = COUNT_TOL) -> int:
    """Number of zeros (with multiplicity) of ``phi`` inside ``contour``.

    ``contour`` is a :class:`Circle`, a :class:`Rectangle`, or a list of
    polygon vertices in counter-clockwise order.

    Raises
    ------
    ZeroOnContour
        ``phi`` vanishes at, or within ``1e-8`` times the contour size of, a node.
    NonConvergence
        The quadrature did not converge or its value is not near an integer.
    """
    phi = make_symbol(phi)
    return _round_count(_moments(phi, contour, (0,), tol)[0])


def _contour_scale(contour) -> float:
    if isinstance(contour, Circle):
        return contour.radius
    if isinstance(contour, Rectangle):
        return max(contour.xi_plus - contour.xi_minus, 2 * contour.Y)
    v = np.asarray(contour, dtype=complex)
    return float(max(np.ptp(v.real), np.ptp(v.imag)))


def _moments(phi, contour, powers, tol):
    integrand = _log_derivative(phi, _contour_scale(contour), powers)
    if isinstance(contour, (Circle, Rectangle)):
        val = contour_integrate(integrand, contour, tol).value
    else:
        val = polygon_integrate(integrand, list(contour), tol).value
    return np.atleast_1d(val)


@dataclass(frozen=True)
class ZeroSet:
    disk_radius: float
    zeros: Tuple[Tuple[complex, int], ...]

    @property
    def points(self) -> np.ndarray:
        return np.array([z for z, _ in self.zeros], dtype=complex)

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([m for _, m in self.zeros], dtype=int)

    @property
    def total(self) -> int:
        return int(self.multiplicities.sum()) if self.zeros else 0

    def expanded(self) -> np.ndarray:
        """Zeros repeated according to multiplicity."""
        return np.repeat(self.points, self.multiplicities) if self.zeros else np.zeros(0, dtype=complex)

    def to_csv(self, path) -> None:
        write_zeros_csv(path, self)


def write_zeros_csv(path, Z: ZeroSet) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["re", "im", "multiplicity"])
        for z, m in Z.zeros:
            w.writerow([format(z.real, ".17g"), format(z.imag, ".17g"), m])


def _newton(phi, z0: complex, m: int, box: Optional[Box] = None, maxit: int = 60) -> Optional[complex]:
    z = complex(z0)
    for _ in range(maxit):
        f = complex(phi(z))
        if f == 0:
            return z
        df = complex(phi.derivative(1, z))
        if df == 0:
            return None
        step = m * f / df
        z -= step
        if box is not None and not box.contains(z, 0.25 * box.size):
            return None
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            return z
    return z


def _sort_key(z: complex):
    return (round(abs(z), 12), np.angle(z))


def _annulus_clear(phi, R: float, delta: float) -> bool:
    try:
        inner = count_zeros(phi, Circle(0.0, R - delta)) if R > delta else 0
        outer = count_zeros(phi, Circle(0.0, R + delta))
    except ZeroOnContour:
        return False
    return inner == outer


def find_zeros(phi, R: float, delta: float = 0.1, max_depth: int = MAX_DEPTH) -> ZeroSet:
    """All zeros of ``phi`` in the closed disk ``|zeta| <= R`` with multiplicities.

    If a zero lies within ``delta`` of the circle ``|zeta| = R`` the radius
    is moved by multiples of ``delta`` (alternately outwards and inwards)
    until the annulus is clear; the radius actually used is recorded in the
    result.  Zeros within ``1e-6`` of each other are reported as one zero
    whose multiplicity is the local count.

    Raises
    ------
    MaxDepth
        Subdivision did not isolate the zeros within ``max_depth`` levels.
    CountMismatch
        The zeros found do not add up to the argument-principle count.
    """
    phi = make_symbol(phi)
    if not R > 0:
        raise BadRange("radius must be positive")
    R_used = None
    for k in range(0, 20):
        for cand in ((R + k * delta, R - k * delta) if k else (R,)):
            if cand > delta and _annulus_clear(phi, cand, delta):
                R_used = cand
                break
        if R_used is not None:
            break
    if R_used is None:
        raise NonConvergence(f"no zero-free annulus found near radius {R}")
    total = count_zeros(phi, Circle(0.0, R_used))

    side = R_used * (1 + 1e-3)
    roots: List[Tuple[complex, int]] = []
    _subdivide(phi, Box(-side, side, -side, side), 0, max_depth, roots, known=None)

    roots = [(z, m) for z, m in roots if abs(z) <= R_used]
    roots.sort(key=lambda t: _sort_key(t[0]))
    found = sum(m for _, m in roots)
    if found != total:
        raise CountMismatch(f"found {found} zeros (with multiplicity) but the argument principle gives {total}")
    return ZeroSet(R_used, tuple(roots))


def _box_count(phi, box: Box) -> int:
    return _round_count(_moments(phi, box.corners, (0,), COUNT_TOL)[0])


def _subdivide(phi, box: Box, depth: int, max_depth: int, roots: list, known: Optional[int]):
    n = _box_count(phi, box) if known is None else known
    if n == 0:
        return
    if depth > max_depth:
        raise MaxDepth(f"subdivision exceeded depth {max_depth} near {complex(box.x0, box.y0)}")
    _, m1 = _moments(phi, box.corners, (0, 1), 1e-12)
    centroid = complex(m1) / n
    z = _newton(phi, centroid, n, box)
    if z is not None and box.contains(z):
        try:
            local = count_zeros(phi, Circle(z, MERGE_RADIUS))
        except ZeroOnContour:
            local = -1
        if local == n:
            roots.append((z, n))
            return
    for fx, fy in zip(_SPLITS, _SPLITS[1:] + _SPLITS[:1]):
        try:
            children = box.split(fx, fy)
            counts = [_box_count(phi, c) for c in children]
        except ZeroOnContour:
            continue
        if sum(counts) != n:
            continue
        for c, k in zip(children, counts):
            _subdivide(phi, c, depth + 1, max_depth, roots, k)
        return
    raise MaxDepth(f"could not split box at depth {depth} without hitting a zero")


# --- counting functions and density diagnostics ---------------------------

def _zero_array(Z) -> np.ndarray:
    if isinstance(Z, ZeroSet):
        return Z.expanded()
    return np.asarray(Z, dtype=complex).ravel()


def _sorted_moduli(Z) -> np.ndarray:
    mods = np.sort(np.abs(_zero_array(Z)))
    if len(mods) and mods[0] == 0:
        raise ZeroAtOrigin("zero set contains 0; counting functions need 0 excluded")
    return mods


@dataclass(frozen=True)
class CountingFunctions:
    r: np.ndarray
    n: np.ndarray
    N: np.ndarray


def counting_functions(Z, r_grid) -> CountingFunctions:
    """``n_Z(r) = #{|zeta| < r}`` and ``N_Z(r) = sum_{|zeta| < r} log(r/|zeta|)``.

    Examples
    --------
    >>> cf = counting_functions([1j, -1j], [np.e])
    >>> int(cf.n[0]), round(float(cf.N[0]), 12)
    (2, 2.0)
    """
    mods = _sorted_moduli(Z)
    r = np.asarray(r_grid, dtype=float)
    cumlog = np.concatenate([[0.0], np.cumsum(np.log(mods))])
    k = np.searchsorted(mods, r, side="left")
    N = k * np.log(r) - cumlog[k]
    return CountingFunctions(r, k.astype(int), N)


def _top_decade(r: np.ndarray, top: Optional[float] = None):
    top = r.max() if top is None else top
    return (r >= top / 10 * (1 - 1e-12)) & (r <= top * (1 + 1e-12))


def _ls_slope(x, y) -> float:
    return float(np.polyfit(x, y, 1)[0])


def exponent_of_convergence(Z, r_max: Optional[float] = None, points: int = 64) -> float:
    """Growth order of ``n_Z``: least-squares slope of ``log n_Z`` against ``log r``
    over the top decade ``[r_max/10, r_max]``.

    Raises
    ------
    TooFewZeros
        Fewer than 50 zeros.
    """
    mods = _sorted_moduli(Z)
    if len(mods) < 50:
        raise TooFewZeros(f"need at least 50 zeros, got {len(mods)}")
    r_max = float(mods[-1]) if r_max is None else float(r_max)
    r = np.geomspace(r_max / 10, r_max, points)
    n = counting_functions(mods, r).n
    ok = n > 0
    if ok.sum() < 3:
        raise TooFewZeros("too few zeros in the top decade")
    return _ls_slope(np.log(r[ok]), np.log(n[ok]))


@dataclass(frozen=True)
class LevinsonResult:
    r: np.ndarray
    margins: np.ndarray
    margin: float
    trend: float
    verdict: str


def levinson_check(Z, interval_length: float, r_max: float, r_min: float = 1.0,
                   points: int = 200) -> LevinsonResult:
    """Levinson completeness margin ``N_Z(r) - |I| r / pi + ln(r)/2`` on a log grid.

    ``margin`` is the maximum over the grid; ``trend`` is the least-squares
    slope of the margin against ``ln r`` over the top decade.  The verdict is
    ``"dense-indicated"`` when the trend is positive, else ``"not-indicated"``.
    These are finite-data trend reports, not statements about limits.
    """
    if not interval_length > 0:
        raise BadRange("interval length must be positive")
    r = np.geomspace(r_min, r_max, points)
    N = counting_functions(Z, r).N
    margins = N - interval_length * r / np.pi + 0.5 * np.log(r)
    sel = _top_decade(r)
    trend = _ls_slope(np.log(r[sel]), margins[sel])
    verdict = "dense-indicated" if trend > 0 else "not-indicated"
    return LevinsonResult(r, margins, float(margins.max()), trend, verdict)


@dataclass(frozen=True)
class GrowthVerdict:
    verdict: str
    slope_top: float
    slope_previous: float


def growth_diagnostic(Z, r_grid) -> GrowthVerdict:
    """Does ``N_Z(r)/r`` look unbounded on the grid?

    The least-squares slope of ``N_Z(r)/r`` against ``ln r`` is taken over
    the top decade and over the decade below it.  ``"unbounded-indicated"``
    requires a positive top slope that has not decayed to less than half of
    the previous decade's slope; anything else is ``"bounded"``.  A slope
    that shrinks tenfold per decade (as for a lattice, where
    ``N/r -> const``) is thereby not mistaken for growth.

    Raises
    ------
    BadRange
        The grid spans less than two decades.
    """
    r = np.asarray(r_grid, dtype=float)
    if r.max() / r.min() < 100 * (1 - 1e-12):
        raise BadRange("r grid must span at least two decades")
    cf = counting_functions(Z, r)
    q = cf.N / r
    top = _top_decade(r)
    prev = _top_decade(r, r.max() / 10)
    s_top = _ls_slope(np.log(r[top]), q[top])
    s_prev = _ls_slope(np.log(r[prev]), q[prev])
    unbounded = s_top > 0 and s_top >= 0.5 * s_prev
    return GrowthVerdict("unbounded-indicated" if unbounded else "bounded", s_top, s_prev)


@dataclass(frozen=True)
class DensityReport:
    r: np.ndarray
    n: np.ndarray
    N: np.ndarray
    lower_slope: float
    exponent_estimate: Optional[float]
    levinson_margin: Optional[float]
    interval_length: Optional[float] = None
    notes: Tuple[str, ...] = field(default_factory=tuple)


def density_report(Z, r_grid, interval_length: Optional[float] = None) -> DensityReport:
    """Counting functions plus the derived diagnostics on one grid.

    ``lower_slope`` is ``min N_Z(r)/r`` over the grid, the largest ``C`` with
    ``N_Z(r) >= C r`` there.
    """
    r = np.asarray(r_grid, dtype=float)
    cf = counting_functions(Z, r)
    notes = []
    try:
        kappa = exponent_of_convergence(Z, r.max())
    except TooFewZeros as exc:
        kappa = None
        notes.append(str(exc))
    margin = None
    if interval_length is not None:
        margin = levinson_check(Z, interval_length, r.max(), r.min()).margin
    return DensityReport(r, cf.n, cf.N, float(np.min(cf.N / r)), kappa, margin,
                         interval_length, tuple(notes))


def write_density_csv(path, report: DensityReport) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "n", "N", "N_over_r"])
        for r, n, N in zip(report.r, report.n, report.N):
            w.writerow([format(r, ".17g"), int(n), format(N, ".17g"), format(N / r, ".17g")])


# name used by the published interface
tgb_diagnostic = growth_diagnostic


def lattice_scale(m: int) -> float:
    """``r_m = m + 1/2 + sqrt(2)/10^m``: ``m < r_m < 2m`` with pairwise irrational ratios."""
    return m + 0.5 + np.sqrt(2.0) * 10.0 ** (-m)


def lattice_union(radius: float, m_max: Optional[int] = None) -> np.ndarray:
    """Union over ``m`` of ``{r_m n : n != 0}`` restricted to ``|zeta| <= radius``.

    With ``m_max=None`` every ``m`` with ``r_m <= radius`` is included.  For
    large ``m`` the perturbation ``sqrt(2)/10^m`` is below double precision,
    so a few points may coincide numerically; this does not affect the
    counting functions.
    """
    out = []
    m = 1
    while True:
        rm = lattice_scale(m)
        if rm > radius or (m_max is not None and m > m_max):
            break
        n = np.arange(1, int(np.floor(radius / rm)) + 1)
        out.append(rm * n)
        out.append(-rm * n)
        m += 1
    return np.concatenate(out).astype(complex) if out else np.zeros(0, dtype=complex)


__all__ = [
    "count_zeros", "find_zeros", "ZeroSet", "write_zeros_csv", "counting_functions",
    "CountingFunctions", "exponent_of_convergence", "levinson_check", "LevinsonResult",
    "growth_diagnostic", "tgb_diagnostic", "GrowthVerdict", "DensityReport", "density_report",
    "write_density_csv",
    "lattice_scale", "lattice_union",
]
