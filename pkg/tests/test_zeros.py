import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from borelcalc.errors import BadRange, TooFewZeros, ZeroAtOrigin, ZeroOnContour
from borelcalc.numerics import Circle, Rectangle
from borelcalc.zeros import (count_zeros, counting_functions, density_report, lattice_union, lattice_scale,
                             exponent_of_convergence, find_zeros, levinson_check, growth_diagnostic, tgb_diagnostic,
                             write_density_csv, write_zeros_csv)


def lattice(radius):
    k = np.arange(1, int(radius / (2 * np.pi)) + 1)
    return np.concatenate([2j * np.pi * k, -2j * np.pi * k])


def squares(radius):
    k = np.arange(1, int(np.sqrt(radius)) + 1)
    return (k ** 2).astype(complex)


# --- counting by the argument principle ---------------------------------------

def test_count_examples():
    assert count_zeros("exp(z)-1", Circle(0, 7)) == 3
    assert count_zeros("z^2+1", Circle(0, 2)) == 2
    assert count_zeros("exp(z^2)", Circle(0, 5)) == 0


def test_count_rectangle_and_polygon():
    assert count_zeros("2*z*cosh(z)", Rectangle(-1, 1, 2)) == 3
    assert count_zeros("z^2+1", [0.5, 2, 2 + 2j, 0.5 + 2j]) == 0
    assert count_zeros("z^2+1", [-0.5, 2, 2 + 2j, -0.5 + 2j]) == 1


def test_zero_on_contour():
    with pytest.raises(ZeroOnContour):
        count_zeros("z-1", Circle(0, 1))
    with pytest.raises(ZeroOnContour):
        count_zeros("z^2+1", [0, 2, 2 + 2j, 2j])


# --- locating zeros -----------------------------------------------------------

def test_find_periodic_zeros():
    Z = find_zeros("exp(z)-1", 7)
    ref = np.array([0, -2j * np.pi, 2j * np.pi])
    assert Z.total == 3 and list(Z.multiplicities) == [1, 1, 1]
    for z in ref:
        assert np.min(np.abs(Z.points - z)) < 1e-10


def test_find_shift_pair_zeros():
    Z = find_zeros("2*z*cosh(z)", 5)
    ref = [0, 0.5j * np.pi, -0.5j * np.pi, 1.5j * np.pi, -1.5j * np.pi]
    assert Z.total == 5
    for z in ref:
        assert np.min(np.abs(Z.points - z)) < 1e-10


def test_find_multiplicities():
    Z = find_zeros("z^2", 1)
    assert Z.zeros == ((Z.zeros[0][0], 2),) and abs(Z.zeros[0][0]) < 1e-10
    W = find_zeros("(z-1)^3*(z+2)", 3)
    assert sorted(W.multiplicities.tolist()) == [1, 3]


def test_radius_adjusted_off_zero():
    Z = find_zeros("z-1", 1.0)
    assert abs(Z.disk_radius - 1.0) >= 0.1 - 1e-12


def test_zeros_csv(tmp_path):
    Z = find_zeros("z^2+1", 2)
    p = tmp_path / "z.csv"
    write_zeros_csv(p, Z)
    lines = p.read_text().splitlines()
    assert lines[0] == "re,im,multiplicity" and len(lines) == 3


@settings(max_examples=15, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=2.5), min_size=1, max_size=4, unique=True))
def test_polynomial_roots_property(roots):
    roots = np.array(roots)
    if len(roots) > 1 and np.min([abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1:]]) < 0.05:
        return
    c = np.polynomial.polynomial.polyfromroots(roots)
    Z = find_zeros(list(c), 3.5)
    inside = roots[np.abs(roots) <= Z.disk_radius]
    assert Z.total == len(inside)
    for z in inside:
        assert np.min(np.abs(Z.points - z)) < 1e-8


# --- counting functions and diagnostics ---------------------------------------

def test_counting_examples():
    cf = counting_functions(lattice(100), [10.0])
    assert cf.n[0] == 2
    assert abs(cf.N[0] - 2 * np.log(10 / (2 * np.pi))) < 1e-12
    cf = counting_functions(np.array([1j, -1j]), [np.e])
    assert cf.n[0] == 2 and abs(cf.N[0] - 2) < 1e-14
    with pytest.raises(ZeroAtOrigin):
        counting_functions(np.array([0, 1]), [2.0])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.1, 20), min_size=1, max_size=10), st.floats(0.5, 25))
def test_counting_function_is_integral(moduli, r):
    Z = np.array(moduli, dtype=complex)
    N = counting_functions(Z, [r]).N[0]

    def n(t):
        return np.sum(np.abs(Z) < t)

    ref = quad(lambda t: n(t) / t, 0.05, r, points=[m for m in moduli if m < r], limit=200)[0]
    assert abs(N - ref) < 1e-8


def test_lattice_union():
    assert 1 < lattice_scale(1) < 2 and 6 < lattice_scale(6) < 12
    Z = lattice_union(100, 2)
    assert len(Z) == 2 * (int(100 / lattice_scale(1)) + int(100 / lattice_scale(2)))


def test_exponent_of_convergence():
    assert abs(exponent_of_convergence(lattice(1e4), 1e4) - 1) < 0.1
    assert abs(exponent_of_convergence(squares(1e4), 1e4) - 0.5) < 0.1
    k = exponent_of_convergence(lattice_union(1e4, 6), 1e4)
    assert k > 1
    with pytest.raises(TooFewZeros):
        exponent_of_convergence(lattice(50), 50)


def test_levinson_examples():
    lat = levinson_check(lattice(1e4), 1.0, 1e4, 10.0)
    assert lat.verdict == "not-indicated"
    corrected = lat.margins + 0.5 * np.log(lat.r)
    assert np.ptp(corrected[lat.r >= 100]) < 1.0
    lat = levinson_check(lattice_union(1e4, 6), 10.0, 1e4, 100.0)
    assert lat.verdict == "dense-indicated" and lat.trend > 0
    sq = levinson_check(squares(1e4), 1.0, 1e4, 100.0)
    assert sq.verdict == "not-indicated" and sq.margins[-1] < sq.margins[0]
    with pytest.raises(BadRange):
        levinson_check(lattice(100), 0.0, 100)


def test_growth_diagnostic():
    assert tgb_diagnostic is growth_diagnostic
    r = np.geomspace(10, 1e4, 61)
    assert growth_diagnostic(lattice(1e4), r).verdict == "bounded"
    assert growth_diagnostic(squares(1e4), r).verdict == "bounded"
    assert growth_diagnostic(lattice_union(1e4), r).verdict == "unbounded-indicated"
    with pytest.raises(BadRange):
        growth_diagnostic(lattice(100), np.geomspace(10, 50, 5))


def test_density_report(tmp_path):
    rep = density_report(lattice(1e3), np.geomspace(10, 1e3, 21), 1.0)
    assert rep.exponent_estimate is not None and rep.levinson_margin is not None
    p = tmp_path / "d.csv"
    write_density_csv(p, rep)
    assert p.read_text().splitlines()[0] == "r,n,N,N_over_r"
    small = density_report(np.array([1j, -1j]), [2.0, 3.0])
    assert small.exponent_estimate is None and small.notes
