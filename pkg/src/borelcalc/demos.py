"""Named reproductions: series divergence, the heat symbol, and a dense zero set."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .calculus import apply_symbol, partial_sum_apply
from .expfun import ExpPoly
from .symbols import make_symbol
from .zeros import counting_functions, lattice_union, exponent_of_convergence, growth_diagnostic

DIVERGENCE_ORDERS = (5, 10, 15, 20)
DIVERGENCE_POINTS = 4096
DIVERGENCE_PERIOD = 64.0
DIVERGENCE_CUTOFF = 40.0
HEAT_TIMES = (0.1, 0.5, 1.0)
DENSITY_M = 6
DENSITY_RADIUS = 1e4


def bump(x: np.ndarray) -> np.ndarray:
    """``exp(-1/(1 - x^2))`` on ``|x| < 1``, zero elsewhere."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    m = np.abs(x) < 1
    out[m] = np.exp(-1.0 / (1.0 - x[m] ** 2))
    return out


def divergence_grid(points: int = DIVERGENCE_POINTS, period: float = DIVERGENCE_PERIOD) -> np.ndarray:
    return -period / 2 + period * np.arange(points) / points


@dataclass(frozen=True)
class DivergenceTable:
    orders: Tuple[int, ...]
    l1_norms: Tuple[float, ...]


def divergence_table(orders: Sequence[int] = DIVERGENCE_ORDERS,
                     cutoff: float = DIVERGENCE_CUTOFF) -> DivergenceTable:
    """L1([-2, 2]) norms of the partial sums of ``exp(z^2)`` applied to a band-limited bump.

    The bump is restricted to frequencies ``|xi| <= cutoff`` on a periodic
    grid; the norms grow without bound as the order increases even though the
    data is smooth and compactly supported (up to the band limit).
    """
    x = divergence_grid()
    u = bump(x)
    norms = tuple(partial_sum_apply("exp(z^2)", K, x, u, cutoff=cutoff).l1_norm for K in orders)
    return DivergenceTable(tuple(orders), norms)


@dataclass(frozen=True)
class HeatTable:
    times: Tuple[float, ...]
    x: np.ndarray
    values: np.ndarray      # shape (len(times), len(x))
    exact: np.ndarray

    @property
    def max_error(self) -> float:
        return float(np.abs(self.values - self.exact).max())


def heat_table(times: Sequence[float] = HEAT_TIMES, x=None) -> HeatTable:
    """``exp(t z^2)`` applied to ``cos x`` against the heat solution ``exp(-t) cos x``."""
    x = np.linspace(-3.0, 3.0, 13) if x is None else np.asarray(x, dtype=float)
    cos = ExpPoly.from_atoms([(1j, [0.5]), (-1j, [0.5])])
    vals, exact = [], []
    for t in times:
        out = apply_symbol(make_symbol(f"exp({t!r}*z^2)"), cos)
        vals.append(np.asarray(out(x)))
        exact.append(np.exp(-t) * np.cos(x))
    return HeatTable(tuple(times), x, np.array(vals), np.array(exact))


@dataclass(frozen=True)
class DensityDemo:
    r: np.ndarray
    n: np.ndarray
    N: np.ndarray
    constant: float
    offset: float
    verdict: str
    kappa: float

    @property
    def margin(self) -> float:
        """``min(N_Z(r) - (C r - offset))`` over the grid; positive when the bound holds."""
        return float(np.min(self.N - (self.constant * self.r - self.offset)))


def density_constant(M: int) -> float:
    """``(2 - 2/e) H_M`` from the lower bound on the counting function of ``M`` lattices."""
    return (2 - 2 / np.e) * float(np.sum(1.0 / np.arange(1, M + 1)))


def density_table(M: int = DENSITY_M, radius: float = DENSITY_RADIUS, points: int = 41) -> DensityDemo:
    """Counting function of the union of ``M`` scaled integer lattices.

    The bound checked is ``N_Z(r) >= C_M r - 2M``; the boundedness verdict
    uses the full family up to ``radius`` (all ``m`` with ``r_m <= radius``).
    """
    Z = lattice_union(radius, M)
    r = np.geomspace(radius / 100, radius, points)
    cf = counting_functions(Z, r)
    full = lattice_union(radius)
    verdict = growth_diagnostic(full, np.geomspace(radius / 1000, radius, 61)).verdict
    kappa = exponent_of_convergence(Z, radius)
    return DensityDemo(r, cf.n, cf.N, density_constant(M), 2.0 * M, verdict, kappa)


__all__ = [
    "bump", "divergence_grid", "DivergenceTable", "divergence_table", "HeatTable", "heat_table",
    "DensityDemo", "density_constant", "density_table",
]
