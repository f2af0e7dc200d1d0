"""Solving ``phi(d/dx) f = g`` in the class of functions of exponential type.

A particular solution is ``f = 1/(2 pi i) \\oint exp(x zeta) B(g)(zeta) / phi(zeta) dzeta``
over any contour enclosing the singularities of ``B(g)`` and no zero of
``phi`` off them (or, for exponential polynomials, the exact atom-wise
inverse).  Solutions of the homogeneous equation are spanned by
``x^j exp(zeta_k x)`` over the zeros ``zeta_k`` of ``phi``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import factorial
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .borel import borel_exppoly, borel_taylor
from .calculus import apply_symbol, series_apply
from .errors import (AtomOnZero, BadRange, CountMismatch, NoAdmissibleRadius, SingularSystem,
                     ZeroOnContour)
from .expfun import ContourFunction, ExpPoly, TaylorRep, _lgamma_vec
from .numerics import Circle, Rectangle, polygon_nodes
from .symbols import make_symbol, series
from .zeros import ZeroSet, count_zeros, find_zeros

log = logging.getLogger(__name__)

ATOM_FLOOR = 1e-8
RADIUS_STEP = 0.5
RADIUS_CAP = 50.0
ANNULUS = 0.1
COND_WARN = 1e12
TAYLOR_TERMS = 256
RESIDUAL_TERMS = 128
DEFAULT_GRID = np.linspace(-3.0, 3.0, 61)


@dataclass(frozen=True, eq=False)
class SolveReport:
    particular: Union[ExpPoly, ContourFunction]
    homogeneous_basis: Tuple[ExpPoly, ...]
    contour_used: Optional[object]
    residual: float
    warnings: Tuple[str, ...] = ()
    taylor: Optional[np.ndarray] = None
    grid: np.ndarray = field(default_factory=lambda: DEFAULT_GRID.copy())

    def values(self, x=None):
        return np.asarray(self.particular(self.grid if x is None else x))


def _type_of(g) -> float:
    if isinstance(g, ExpPoly):
        return g.type
    if isinstance(g, TaylorRep):
        return g.tau
    raise TypeError(f"unsupported right-hand side {type(g).__name__}")


def _borel(g):
    return borel_exppoly(g) if isinstance(g, ExpPoly) else borel_taylor(g)


def _annulus_free(phi, R: float, width: float = ANNULUS) -> bool:
    try:
        inner = count_zeros(phi, Circle(0.0, R - width)) if R > width else 0
        outer = count_zeros(phi, Circle(0.0, R + width))
    except ZeroOnContour:
        return False
    return inner == outer


def admissible_radius(phi, tau: float, R_hint: Optional[float] = None,
                      step: float = RADIUS_STEP, cap: float = RADIUS_CAP) -> float:
    """Smallest radius ``tau + 1 + k*step`` (or ``R_hint + k*step``) whose
    annulus ``[R - 0.1, R + 0.1]`` holds no zero of ``phi``.

    Raises
    ------
    NoAdmissibleRadius
        None found up to ``tau + cap``.
    """
    phi = make_symbol(phi)
    R = tau + 1.0 if R_hint is None else float(R_hint)
    if not R > tau:
        raise BadRange(f"radius hint {R} must exceed the type {tau}")
    while R <= tau + cap:
        if _annulus_free(phi, R):
            return R
        R += step
    raise NoAdmissibleRadius(f"no zero-free circle found for tau < R <= tau + {cap}")


def contour_taylor(H, contour, n: int = TAYLOR_TERMS, nodes: int = 1024) -> np.ndarray:
    """Taylor coefficients at 0 of ``x -> 1/(2 pi i) \\oint exp(x zeta) H dzeta``.

    ``b_k = (1/k!) 1/(2 pi i) \\oint zeta^k H dzeta`` on a fixed node set
    (trapezoid on circles, Gauss-Legendre on polygons).  Powers and
    factorials are combined in log form, so large ``k`` does not overflow.
    """
    if isinstance(contour, Circle):
        u = contour.radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)
        z = contour.center + u
        w = u / nodes
    else:
        verts = contour.corners if isinstance(contour, Rectangle) else list(contour)
        z, dz = polygon_nodes(verts, max(1, nodes // 64))
        w = dz / (2j * np.pi)
    hw = np.asarray(H(z), dtype=complex) * w
    k = np.arange(n)
    with np.errstate(divide="ignore"):
        logz = np.log(z.astype(complex))
    powers = np.exp(np.outer(k, logz) - _lgamma_vec(k + 1)[:, None])
    powers[:, z == 0] = 0.0
    if np.any(z == 0):
        powers[0, z == 0] = 1.0
    return powers @ hw


def _residual_series(phi, b: np.ndarray, g, grid) -> float:
    a = make_symbol(phi).taylor(RESIDUAL_TERMS)
    lhs = series_apply(a, b, grid)
    return float(np.max(np.abs(lhs - g(grid))))


def solve_particular_contour(phi, g, R_hint: Optional[float] = None, contour=None,
                             grid=None, tol: float = 1e-12) -> SolveReport:
    """Particular solution by the contour integral of ``exp(x zeta) B(g) / phi``.

    Parameters
    ----------
    phi : symbol
    g : ExpPoly or TaylorRep
    R_hint : float, optional
        Start of the admissible-radius search (default ``type(g) + 1``).
    contour : Circle or Rectangle, optional
        Use this contour as given.  It must enclose every singularity of
        ``B(g)``; zeros of ``phi`` inside it contribute homogeneous terms.
    grid : array, optional
        Verification grid for the residual (default 61 points on [-3, 3]).

    Notes
    -----
    The residual is ``sup |sum_k a_k f^(k) - g|`` on the grid, computed from
    the Taylor coefficients of ``f`` (resampled from the contour) and of
    ``phi``; it does not reuse the cancellation ``phi * B(g) / phi``.
    """
    phi = make_symbol(phi)
    grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)
    tau = _type_of(g)
    B = _borel(g)
    if contour is None:
        contour = Circle(0.0, admissible_radius(phi, tau, R_hint))

    def H(z):
        return B(z) / phi(z)

    f = ContourFunction(H, contour, tol)
    b = contour_taylor(H, contour)
    residual = _residual_series(phi, b, g, grid)
    warnings = []
    if phi.truncated:
        warnings.append("symbol given as a truncated coefficient list")
    return SolveReport(f, (), contour, residual, tuple(warnings), b, grid)


def _atom_inverse(phi, zeta: complex, p: np.ndarray) -> np.ndarray:
    # q = sum_l r_l p^(l), r = Taylor coefficients of 1/phi about zeta
    val = complex(phi(zeta))
    if abs(val) < ATOM_FLOOR:
        raise AtomOnZero(zeta, val)
    m = len(p)
    c = phi.taylor(m, zeta)
    r = series.reciprocal_div(series.constant(1.0, m), c)
    q = np.zeros(m, dtype=complex)
    dp = p.copy()
    for l in range(m):
        q[: len(dp)] += r[l] * dp
        dp = np.polynomial.polynomial.polyder(dp) if len(dp) > 1 else np.zeros(0)
    return q


def solve_particular_atomic(phi, g: ExpPoly) -> ExpPoly:
    """Exact particular solution for an exponential-polynomial right-hand side.

    Each atom ``p(x) e^{zeta x}`` maps to ``q(x) e^{zeta x}`` with
    ``q = sum_l r_l p^(l)`` and ``r_l`` the Taylor coefficients of
    ``1/phi`` at ``zeta``.

    Raises
    ------
    AtomOnZero
        ``|phi(zeta)| < 1e-8`` for some atom.
    """
    phi = make_symbol(phi)
    return ExpPoly.from_atoms([(z, _atom_inverse(phi, z, p)) for z, p in g.atoms])


def _basis_from_zeros(Z: ZeroSet) -> List[ExpPoly]:
    out = []
    for zeta, m in Z.zeros:
        for j in range(m):
            out.append(ExpPoly.from_atoms([(zeta, [0.0] * j + [1.0])]))
    return out


def homogeneous_basis(phi, tau: float) -> List[ExpPoly]:
    """``x^j e^{zeta_k x}`` for the zeros ``zeta_k`` of ``phi`` with ``|zeta_k| <= tau``."""
    return _basis_from_zeros(find_zeros(make_symbol(phi), tau))


def _annihilation_warnings(phi, basis, grid) -> List[str]:
    out = []
    for b in basis:
        scale = float(np.max(np.abs(b(grid))))
        err = float(np.max(np.abs(apply_symbol(phi, b)(grid))))
        if err >= 1e-7 * scale:
            out.append(f"basis element at zeta = {b.atoms[0][0]:.6g} not annihilated: {err:.3e}")
    return out


def general_solution(phi, g, tau: float, R_hint: Optional[float] = None, grid=None) -> SolveReport:
    """Particular solution plus the homogeneous basis for zeros with ``|zeta| <= tau``."""
    phi = make_symbol(phi)
    rep = solve_particular_contour(phi, g, R_hint, grid=grid)
    basis = homogeneous_basis(phi, tau)
    warnings = list(rep.warnings) + _annihilation_warnings(phi, basis, rep.grid)
    return SolveReport(rep.particular, tuple(basis), rep.contour_used, rep.residual,
                       tuple(warnings), rep.taylor, rep.grid)


def solve_full_pivot(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination with complete pivoting (deterministic tie-breaking)."""
    A = np.array(A, dtype=complex)
    b = np.array(b, dtype=complex)
    n = len(b)
    cols = np.arange(n)
    scale = float(np.abs(A).max()) if n else 0.0
    for k in range(n):
        sub = np.abs(A[k:, k:])
        i, j = np.unravel_index(int(np.argmax(sub)), sub.shape)
        i += k
        j += k
        if sub.max() <= 1e-14 * scale or scale == 0:
            raise SingularSystem("collocation matrix is singular", float(np.linalg.cond(A)))
        A[[k, i]] = A[[i, k]]
        b[[k, i]] = b[[i, k]]
        A[:, [k, j]] = A[:, [j, k]]
        cols[[k, j]] = cols[[j, k]]
        f = A[k + 1:, k] / A[k, k]
        A[k + 1:, k:] -= np.outer(f, A[k, k:])
        b[k + 1:] -= f * b[k]
    y = np.zeros(n, dtype=complex)
    for k in range(n - 1, -1, -1):
        y[k] = (b[k] - A[k, k + 1:] @ y[k + 1:]) / A[k, k]
    x = np.zeros(n, dtype=complex)
    x[cols] = y
    return x


def _basis_derivative_at_zero(b: ExpPoly, j: int) -> complex:
    # x^i e^{zeta x}: j-th derivative at 0 is j!/(j-i)! zeta^(j-i) for j >= i
    zeta, p = b.atoms[0]
    i = len(p) - 1
    if j < i:
        return 0.0
    return factorial(j) / factorial(j - i) * zeta ** (j - i) * p[-1]


@dataclass(frozen=True, eq=False)
class IVPResult:
    solution: Union[ExpPoly, Callable]
    coefficients: np.ndarray
    basis: Tuple[ExpPoly, ...]
    particular: Optional[object]
    condition: float
    warnings: Tuple[str, ...] = ()

    def __call__(self, x):
        return self.solution(x)


def ivp_solve(phi, g, conditions: Sequence[complex], tau: float, R_hint: Optional[float] = None) -> IVPResult:
    """Unique solution with ``f^(j-1)(0) = c_j`` when ``phi`` has ``N = len(conditions)``
    zeros (with multiplicity) in ``|zeta| <= tau``.

    ``g`` may be ``None`` (homogeneous problem), an ``ExpPoly`` (exact
    particular solution when no atom sits on a zero) or a ``TaylorRep``.

    Raises
    ------
    CountMismatch
        The number of conditions differs from the number of zeros.
    SingularSystem
        The generalized Vandermonde system is singular.
    """
    phi = make_symbol(phi)
    Z = find_zeros(phi, tau)
    basis = _basis_from_zeros(Z)
    N = len(conditions)
    if Z.total != N:
        raise CountMismatch(f"phi has {Z.total} zeros in |zeta| <= {Z.disk_radius} but {N} conditions were given")
    particular = None
    if g is not None and not (isinstance(g, ExpPoly) and not g.atoms):
        if isinstance(g, ExpPoly):
            try:
                particular = solve_particular_atomic(phi, g)
            except AtomOnZero:
                particular = solve_particular_contour(phi, g, R_hint).particular
        else:
            particular = solve_particular_contour(phi, g, R_hint).particular
    rhs = np.array(conditions, dtype=complex)
    if particular is not None:
        for j in range(N):
            if isinstance(particular, ExpPoly):
                d = particular
                for _ in range(j):
                    d = d.derivative()
                rhs[j] -= d(0.0)
            else:
                rhs[j] -= particular.derivative(j, 0.0)
    M = np.array([[_basis_derivative_at_zero(b, j) for b in basis] for j in range(N)], dtype=complex)
    warnings = []
    cond = float(np.linalg.cond(M)) if N else 1.0
    alpha = solve_full_pivot(M, rhs) if N else np.zeros(0, dtype=complex)
    if cond > COND_WARN:
        msg = f"collocation matrix condition number {cond:.3e} exceeds {COND_WARN:g}"
        log.warning(msg)
        warnings.append(msg)
    hom = ExpPoly.from_atoms([(b.atoms[0][0], a * b.atoms[0][1]) for a, b in zip(alpha, basis)])
    if particular is None:
        solution = hom
    elif isinstance(particular, ExpPoly):
        solution = particular + hom
    else:
        def solution(x, _p=particular, _h=hom):
            return _p(x) + _h(x)
    return IVPResult(solution, alpha, tuple(basis), particular, cond, tuple(warnings))


__all__ = [
    "SolveReport", "admissible_radius", "contour_taylor", "solve_particular_contour",
    "solve_particular_atomic", "homogeneous_basis", "general_solution", "solve_full_pivot",
    "IVPResult", "ivp_solve",
]
