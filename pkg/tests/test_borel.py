import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from borelcalc.borel import (borel_exppoly, borel_laplace, borel_series, borel_taylor, inverse_borel,
                             laurent_constant, spectral_measure_from_borel)
from borelcalc.errors import NoDecay, NonConvergence, OutsideDomain
from borelcalc.expfun import ExpPoly, TaylorRep

from conftest import exppoly_cos, exppoly_exp, exppoly_xe2x


def test_series_examples():
    assert abs(borel_series(exppoly_exp().to_taylor(128), 2.0).value - 1) < 1e-12
    assert abs(borel_series(exppoly_cos().to_taylor(128), 2j).value + 2j / 3) < 1e-12
    one = TaylorRep(np.array([1.0]), 0.0)
    assert abs(borel_series(one, 0.7 + 0.2j).value - 1 / (0.7 + 0.2j)) < 1e-15


def test_series_domain_and_convergence():
    t = exppoly_exp().to_taylor(128)
    with pytest.raises(OutsideDomain):
        borel_series(t, 0.5)
    with pytest.raises(NonConvergence):
        borel_series(exppoly_exp().to_taylor(16), 1.2)


def test_closed_forms():
    z = np.array([2.0, 3j, -2.5])
    assert np.allclose(borel_exppoly(exppoly_exp())(z), 1 / (z - 1))
    assert np.allclose(borel_exppoly(exppoly_cos())(z), z / (z ** 2 + 1))
    B = borel_exppoly(exppoly_xe2x())
    w = np.array([5.0, 3j, -2.5])
    assert np.allclose(B(w), 1 / (w - 2) ** 2)
    ser = borel_series(exppoly_xe2x().to_taylor(128), 5.0).value
    assert abs(ser - B(5.0)) < 1e-9
    assert B.valid_radius == 2


def test_laplace_examples():
    assert abs(borel_laplace(np.cos, 0.0, 2.0) - 0.4) < 1e-12
    assert abs(borel_laplace(np.exp, 0.0, 3.0) - 0.5) < 1e-12
    assert abs(borel_laplace(lambda x: np.ones_like(x), 0.0, 1.0) - 1) < 1e-12


def test_laplace_rotated_ray():
    # theta = -arg(zeta) reaches zeta where the real-axis integral diverges
    z = 2 * np.exp(2.5j)
    v = borel_laplace(np.exp, -np.angle(z), z)
    assert abs(v - 1 / (z - 1)) < 1e-12


def test_laplace_no_decay():
    with pytest.raises(NoDecay):
        borel_laplace(np.exp, 0.0, 0.5)


def test_inverse_examples():
    assert abs(inverse_borel(borel_exppoly(exppoly_exp()), 2.0, 1.0) - np.e) < 1e-12
    assert abs(inverse_borel(borel_exppoly(exppoly_cos()), 2.0, np.pi) + 1) < 1e-12
    for x in (-2.5, 0.0, 2.5):
        assert abs(inverse_borel(lambda z: 1 / z, 1.0, x) - 1) < 1e-10
    with pytest.raises(OutsideDomain):
        inverse_borel(borel_exppoly(exppoly_exp()), 0.9, 1.0)


def test_taylor_rep_vectorised():
    B = borel_taylor(exppoly_cos().to_taylor(128))
    z = 3 * np.exp(2j * np.pi * np.arange(8) / 8)
    assert np.allclose(B(z), z / (z ** 2 + 1), atol=1e-13)


def test_spectral_measure_and_laurent():
    B = borel_exppoly(exppoly_cos())
    mu = spectral_measure_from_borel(B, 2.0)
    assert abs(mu.as_function()(0.5) - np.cos(0.5)) < 1e-12
    C = laurent_constant(B, 3.0)
    assert abs(C - 9 / 8) < 1e-2


@settings(max_examples=30, deadline=None)
@given(lam=st.complex_numbers(max_magnitude=1.5), c=st.complex_numbers(max_magnitude=3),
       theta=st.floats(0, 2 * np.pi))
def test_series_matches_closed_form(lam, c, theta):
    f = ExpPoly.from_atoms([(lam, [c])])
    if not f.atoms:
        return
    z = 3.0 * np.exp(1j * theta)
    got = borel_series(f.to_taylor(128), z).value
    assert abs(got - borel_exppoly(f)(z)) < 1e-10 * max(1.0, abs(c))


@settings(max_examples=20, deadline=None)
@given(lam=st.complex_numbers(max_magnitude=1.5), x=st.floats(-2, 2))
def test_inverse_roundtrip_property(lam, x):
    f = ExpPoly.from_atoms([(lam, [1.0, 0.5])])
    got = inverse_borel(borel_exppoly(f), 2.5, x)
    assert abs(got - f(x)) < 1e-9 * max(1.0, abs(f(x)))
