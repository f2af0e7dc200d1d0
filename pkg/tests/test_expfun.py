from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from borelcalc.borel import borel_exppoly
from borelcalc.errors import BadRange, TruncationError
from borelcalc.expfun import (AtomicDistribution, ContourFunction, ExpPoly, SpectralMeasure, TaylorRep,
                              coefficient_error, evaluate, exp_type_estimate, p_transform, to_atomic)
from borelcalc.numerics import Circle
from borelcalc.symbols import cauchy_derivative

from conftest import exppoly_cos, exppoly_exp, exppoly_one_plus_x, exppoly_xe2x


def test_exppoly_values(fixtures4):
    x = np.linspace(-3, 3, 13)
    for f, ref in fixtures4:
        assert np.allclose(f(x), ref(x), rtol=1e-14, atol=1e-14)


def test_from_atoms_merges_and_trims():
    f = ExpPoly.from_atoms([(1, [1, 0, 0]), (1, [0, 2]), (2, [0.0])])
    assert len(f.atoms) == 1
    assert np.allclose(f.atoms[0][1], [1, 2])


def test_derivative_exact():
    d = exppoly_xe2x().derivative()
    x = np.linspace(-1, 1, 5)
    assert np.allclose(d(x), (1 + 2 * x) * np.exp(2 * x), rtol=1e-14)


def test_taylor_coefficients():
    b = exppoly_cos().taylor(8)
    ref = [np.cos(np.pi * k / 2) / factorial(k) for k in range(8)]
    assert np.allclose(b, ref, atol=1e-16)


def test_coefficient_error():
    assert coefficient_error(exppoly_cos(), exppoly_cos()) == 0
    assert coefficient_error(exppoly_cos(), exppoly_exp()) >= 0.5


def test_type_estimates():
    e2 = ExpPoly.from_atoms([(2, [1])])
    assert abs(exp_type_estimate(e2.to_taylor(128), 64) - 2) < 0.05
    assert abs(exp_type_estimate(exppoly_cos().to_taylor(128)) - 1) < 0.05
    assert exp_type_estimate(exppoly_one_plus_x().to_taylor(128)) == 0.0
    with pytest.raises(BadRange):
        exp_type_estimate(TaylorRep(np.ones(4), 1.0))


def test_taylor_rep_radius_and_truncation():
    t = exppoly_exp().to_taylor(40)
    r = t.eval_radius()
    assert 5 < r < 41
    assert abs(t(1.0) - np.e) < 1e-13
    with pytest.raises(TruncationError):
        t(r + 1)


def test_to_atomic_examples():
    d = to_atomic(exppoly_exp())
    assert len(d.atoms) == 1 and d.atoms[0][0] == 1
    c = to_atomic(exppoly_cos())
    assert sorted((z.imag, p[0].real) for z, p in c.atoms) == [(-1, 0.5), (1, 0.5)]
    x = to_atomic(ExpPoly.from_atoms([(0, [0, 1])]))
    assert np.allclose(x.atoms[0][1], [0, 1])


def test_p_transform_examples():
    assert abs(p_transform(to_atomic(exppoly_exp()), 2.0) - np.exp(2)) < 1e-13
    mu = SpectralMeasure(2.0, borel_exppoly(exppoly_exp()), 1.0)
    assert abs(p_transform(mu, 1.0) - np.e) < 1e-8
    assert p_transform(AtomicDistribution(()), 1.5) == 0
    with pytest.raises(BadRange):
        SpectralMeasure(0.5, lambda z: 1 / z, 1.0)


def test_contour_function_and_evaluate():
    f = ContourFunction(lambda z: z / (z ** 2 + 1), Circle(0, 2))
    x = np.linspace(-3, 3, 7)
    assert np.allclose(f(x), np.cos(x), atol=1e-12)
    assert np.allclose(f.derivative(1, x), -np.sin(x), atol=1e-12)
    assert np.allclose(f.taylor(6), exppoly_cos().taylor(6), atol=1e-13)
    assert np.allclose(evaluate(to_atomic(exppoly_cos()), x), np.cos(x), atol=1e-15)


atoms = st.lists(
    st.tuples(st.complex_numbers(max_magnitude=2, allow_nan=False),
              st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False), min_size=1, max_size=3)),
    min_size=1, max_size=3)


@settings(max_examples=40, deadline=None)
@given(atoms, st.floats(-1, 1))
def test_derivative_matches_cauchy(a, x):
    f = ExpPoly.from_atoms(a)
    ref = cauchy_derivative(f, 1, x)
    assert abs(f.derivative()(x) - ref) < 1e-9 * max(1.0, abs(ref), float(np.abs(f(x + 0.5 * np.exp(
        2j * np.pi * np.arange(16) / 16))).max()))


@settings(max_examples=40, deadline=None)
@given(atoms, atoms)
def test_taylor_is_linear(a, b):
    f, g = ExpPoly.from_atoms(a), ExpPoly.from_atoms(b)
    lhs = (f + g).taylor(20)
    rhs = f.taylor(20) + g.taylor(20)
    assert np.allclose(lhs, rhs, atol=1e-12 * max(1.0, float(np.abs(rhs).max())))
