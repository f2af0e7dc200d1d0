"""Contour quadrature and grids.

All integrals here are normalised the way the rest of the package uses them,

    I = 1/(2*pi*i) * \\oint f(zeta) dzeta,

so that ``contour_integrate(lambda z: 1/z, Circle(0, 1))`` is 1.

Integrands are called with a 1-d complex array of nodes and must return an
array of the same length (or of shape ``(nodes, m)`` for vector-valued
integrands, e.g. one column per evaluation point ``x``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import BadRange, NonConvergence, NonFinite

DEFAULT_TOL = 1e-10
NODE_CAP = 2 ** 16
GL_ORDER = 16

_gl_x, _gl_w = np.polynomial.legendre.leggauss(GL_ORDER)


@dataclass(frozen=True)
class Circle:
    center: complex = 0.0
    radius: float = 1.0
    nodes: int = 64

    def __post_init__(self):
        if not self.radius > 0:
            raise BadRange(f"circle radius must be positive, got {self.radius}")
        if self.nodes < 8 or self.nodes % 2:
            raise BadRange(f"node count must be even and >= 8, got {self.nodes}")


@dataclass(frozen=True)
class Rectangle:
    """Counter-clockwise boundary of [xi_minus, xi_plus] x [-Y, Y]."""

    xi_minus: float
    xi_plus: float
    Y: float
    nodes_per_side: int = 32

    def __post_init__(self):
        if not self.xi_minus < self.xi_plus:
            raise BadRange("need xi_minus < xi_plus")
        if not self.Y > 0:
            raise BadRange("need Y > 0")
        if self.nodes_per_side < 8 or self.nodes_per_side % 2:
            raise BadRange("nodes_per_side must be even and >= 8")

    @property
    def corners(self):
        a, b, y = self.xi_minus, self.xi_plus, self.Y
        return [complex(a, -y), complex(b, -y), complex(b, y), complex(a, y)]

    def reversed(self):
        """Same trace, clockwise.  Only meaningful through :func:`polygon_integrate`."""
        return self.corners[::-1]


Contour = Union[Circle, Rectangle]


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    est_error: float
    nodes_used: int


def uniform_grid(a: float, b: float, n: int) -> np.ndarray:
    """``n`` equispaced points on ``[a, b]``, endpoints included."""
    if not a < b:
        raise BadRange(f"empty range [{a}, {b}]")
    if n < 2:
        raise BadRange(f"need at least 2 grid points, got {n}")
    return np.linspace(a, b, n)


def _evaluate(f, nodes):
    with np.errstate(all="ignore"):
        vals = np.asarray(f(nodes), dtype=complex)
    if vals.ndim == 0:
        vals = np.full(nodes.shape, complex(vals))
    if not np.all(np.isfinite(vals)):
        bad = nodes[~np.isfinite(vals).reshape(len(nodes), -1).all(axis=1)][0]
        raise NonFinite(f"integrand is not finite at zeta = {bad!r}")
    return vals


def _converged(new, old, scale, tol):
    diff = float(np.max(np.abs(new - old)))
    return diff, diff < tol * max(1.0, scale)


def _circle_integrate(f, c: Circle, tol, max_nodes):
    n = c.nodes
    theta = 2 * np.pi * np.arange(n) / n
    u = c.radius * np.exp(1j * theta)
    terms = _weight(_evaluate(f, c.center + u), u)
    total = terms.sum(axis=0)
    abs_total = np.abs(terms).sum(axis=0)
    value = total / n
    while True:
        if 2 * n > max_nodes:
            raise NonConvergence(f"circle quadrature did not converge within {max_nodes} nodes")
        theta = 2 * np.pi * (np.arange(n) + 0.5) / n
        u = c.radius * np.exp(1j * theta)
        terms = _weight(_evaluate(f, c.center + u), u)
        total = total + terms.sum(axis=0)
        abs_total = abs_total + np.abs(terms).sum(axis=0)
        n *= 2
        new = total / n
        diff, ok = _converged(new, value, float(np.max(abs_total)) / n, tol)
        value = new
        if ok:
            return QuadratureResult(_scalar(value), diff, n)


def _weight(vals, w):
    return vals * w if vals.ndim == 1 else vals * w[:, None]


def _scalar(v):
    v = np.asarray(v)
    return complex(v) if v.ndim == 0 else v


def segment_rule(a: complex, b: complex, panels: int):
    """Composite Gauss-Legendre nodes and ``dzeta`` weights on the segment a -> b."""
    edges = np.linspace(0.0, 1.0, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    s = (mid[:, None] + half[:, None] * _gl_x[None, :]).ravel()
    w = (half[:, None] * _gl_w[None, :]).ravel()
    return a + (b - a) * s, (b - a) * w


def polygon_nodes(vertices, panels: int):
    nodes, weights = [], []
    m = len(vertices)
    for k in range(m):
        z, w = segment_rule(vertices[k], vertices[(k + 1) % m], panels)
        nodes.append(z)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def polygon_integrate(f, vertices, tol=DEFAULT_TOL, nodes_per_side=32, max_nodes=NODE_CAP):
    """1/(2 pi i) times the integral of ``f`` around the closed polygon ``vertices``."""
    panels = max(1, nodes_per_side // GL_ORDER)
    value = None
    while True:
        z, w = polygon_nodes(vertices, panels)
        if len(z) > max_nodes:
            raise NonConvergence(f"polygon quadrature did not converge within {max_nodes} nodes")
        terms = _weight(_evaluate(f, z), w)
        new = terms.sum(axis=0) / (2j * np.pi)
        scale = float(np.max(np.abs(terms).sum(axis=0))) / (2 * np.pi)
        if value is not None:
            diff, ok = _converged(new, value, scale, tol)
            if ok:
                return QuadratureResult(_scalar(new), diff, len(z))
        value = new
        panels *= 2


def contour_integrate(integrand: Callable, contour: Contour, tol: float = DEFAULT_TOL,
                      max_nodes: int = NODE_CAP) -> QuadratureResult:
    """Compute ``1/(2 pi i) \\oint integrand(zeta) dzeta`` by refinement.

    The node count is doubled until two successive estimates differ by less
    than ``tol * max(1, S)``, where ``S`` is the sum of the absolute values of
    the quadrature terms (the size below which rounding dominates).

    Raises
    ------
    NonConvergence
        The node cap was reached first.
    NonFinite
        The integrand produced NaN or infinity at a node.
    """
    if not tol > 0:
        raise BadRange("tol must be positive")
    if isinstance(contour, Circle):
        return _circle_integrate(integrand, contour, tol, max_nodes)
    if isinstance(contour, Rectangle):
        return polygon_integrate(integrand, contour.corners, tol, contour.nodes_per_side, max_nodes)
    raise TypeError(f"unsupported contour {contour!r}")
