import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from borelcalc.calculus import apply_symbol
from borelcalc.errors import AtomOnZero, BadRange, CountMismatch, SingularSystem
from borelcalc.expfun import ExpPoly, coefficient_error
from borelcalc.numerics import Circle
from borelcalc.solver import (admissible_radius, general_solution, homogeneous_basis, ivp_solve,
                              solve_full_pivot, solve_particular_atomic, solve_particular_contour)
from borelcalc.symbols import PolySymbol

from conftest import exppoly_cos, exppoly_exp

X = np.linspace(-3, 3, 61)
E2X = ExpPoly.from_atoms([(2, [1])])


def test_contour_ode_with_zero_free_contour():
    rep = solve_particular_contour("z^2+1", E2X, contour=Circle(2.0, 0.5))
    assert np.abs(rep.values(X) - np.exp(2 * X) / 5).max() < 1e-9 * np.exp(6)
    assert rep.residual < 1e-9 * np.exp(6)


def test_contour_no_zero_symbol():
    rep = solve_particular_contour("exp(z)", exppoly_exp())
    assert np.abs(rep.values(X) - np.exp(X - 1)).max() < 1e-10


def test_contour_shift_pair():
    rep = solve_particular_contour("2*z*cosh(z)", exppoly_cos(), R_hint=1.25)
    assert rep.contour_used.radius == 1.25
    assert np.abs(rep.values(X) - np.sin(X) / (2 * np.cos(1))).max() < 1e-7
    assert rep.residual < 1e-8


def test_enclosed_zeros_add_homogeneous_terms():
    # default circle of radius 3 encloses +-i; the difference lies in span{e^{ix}, e^{-ix}}
    rep = solve_particular_contour("z^2+1", E2X)
    d = rep.values(X) - np.exp(2 * X) / 5
    A = np.stack([np.exp(1j * X), np.exp(-1j * X)], axis=1)
    c, *_ = np.linalg.lstsq(A, d, rcond=None)
    assert np.abs(A @ c - d).max() < 1e-9
    assert np.abs(c).max() > 1e-3


def test_truncated_symbol_warns():
    rep = solve_particular_contour(PolySymbol([1, 1]), E2X, contour=Circle(2.0, 0.5))
    assert any("truncated" in w for w in rep.warnings)


def test_admissible_radius():
    assert admissible_radius("2*z*cosh(z)", 1.0) == 2.0
    assert admissible_radius("z^2+1", 0.0) == 1.5
    with pytest.raises(BadRange):
        admissible_radius("z", 2.0, R_hint=1.0)


def test_atomic_examples():
    f = solve_particular_atomic("exp(z)", ExpPoly.from_atoms([(0, [0, 1])]))
    assert coefficient_error(f, ExpPoly.from_atoms([(0, [-1, 1])])) < 1e-14
    f = solve_particular_atomic("z^2+1", E2X)
    assert coefficient_error(f, E2X.scale(0.2)) < 1e-15
    g = E2X + exppoly_cos()
    f = solve_particular_atomic("z-1", g)
    assert np.abs(apply_symbol("z-1", f)(X) - g(X)).max() < 1e-12 * np.exp(6)
    with pytest.raises(AtomOnZero):
        solve_particular_atomic("z^2+1", exppoly_cos())


def test_homogeneous_bases():
    b = homogeneous_basis("z^2+1", 2)
    assert sorted(e.atoms[0][0].imag for e in b) == [-1, 1]
    b = homogeneous_basis("exp(z)-1", 7)
    assert len(b) == 3
    b = homogeneous_basis("z^2", 1)
    assert [list(e.atoms[0][1]) for e in b] == [[1], [0, 1]]


def test_general_solution():
    rep = general_solution("2*z*cosh(z)", exppoly_cos(), 5.0, R_hint=1.25)
    assert len(rep.homogeneous_basis) == 5
    assert not rep.warnings


def test_ivp_examples():
    r = ivp_solve("z^2+1", None, [1, 0], 2)
    assert np.abs(r(X) - np.cos(X)).max() < 1e-12
    r = ivp_solve("z-2", None, [3], 3)
    assert abs(r.coefficients[0] - 3) < 1e-12
    r = ivp_solve("exp(z)-1", None, [1, 0, -4 * np.pi ** 2], 7)
    pts = np.array([b.atoms[0][0] for b in r.basis])
    coef = {round(p.imag / (2 * np.pi)): c for p, c in zip(pts, r.coefficients)}
    assert abs(coef[0]) < 1e-8 and abs(coef[1] - 0.5) < 1e-8 and abs(coef[-1] - 0.5) < 1e-8
    assert np.abs(r(X) - np.cos(2 * np.pi * X)).max() < 1e-8


def test_ivp_with_forcing():
    r = ivp_solve("z^2+1", E2X, [0, 0], 2)
    f = r.solution
    assert abs(f(0.0)) < 1e-13 and abs(f.derivative()(0.0)) < 1e-13
    assert np.abs(apply_symbol("z^2+1", f)(X) - np.exp(2 * X)).max() < 1e-10 * np.exp(6)


def test_ivp_count_mismatch():
    with pytest.raises(CountMismatch):
        ivp_solve("z^2+1", None, [1], 2)


def test_full_pivot():
    A = np.array([[1e-20, 1], [1, 1]])
    assert np.allclose(solve_full_pivot(A, [1, 2]), np.linalg.solve(A, [1, 2]))
    with pytest.raises(SingularSystem) as exc:
        solve_full_pivot(np.ones((2, 2)), [1, 1])
    assert exc.value.cond > 1e12


@settings(max_examples=30, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=5), min_size=1, max_size=5))
def test_full_pivot_property(vals):
    rng = np.random.default_rng(len(vals))
    n = len(vals)
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    x = np.array(vals)
    assert np.allclose(solve_full_pivot(A, A @ x), x, atol=1e-8 * max(1, np.abs(x).max()))


@settings(max_examples=25, deadline=None)
@given(lam=st.complex_numbers(max_magnitude=2), c=st.lists(st.complex_numbers(max_magnitude=2),
                                                           min_size=1, max_size=3))
def test_atomic_solution_property(lam, c):
    phi = "exp(z)+z^2+2"
    g = ExpPoly.from_atoms([(lam, c)])
    if not g.atoms:
        return
    f = solve_particular_atomic(phi, g)
    x = np.linspace(-1, 1, 5)
    lhs = apply_symbol(phi, f)(x)
    assert np.abs(lhs - g(x)).max() < 1e-9 * max(1.0, float(np.abs(g(x)).max()))
