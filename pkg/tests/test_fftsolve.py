import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from borelcalc.borel import borel_exppoly
from borelcalc.calculus import TranslationDifferentialForm
from borelcalc.errors import BadRange, FormatError, StripViolation, TailTooShort, ZeroOnContour
from borelcalc.fftsolve import (SampledBorel, SampledSignal, StripConfig, box_contour_solve,
                                estimate_decay_abscissas, fd_derivative, fft_solve, make_strip_config,
                                strip_min_check, translation_residual)

from conftest import exppoly_cos


def gaussian_fixture():
    return SampledSignal.from_function(lambda x: (4 * x ** 2 - 1) * np.exp(-x ** 2), -12, 12, 2.0 ** -7)


def f0(x):
    return np.exp(-x) * np.sin(3 * x) * np.exp(-x ** 2 / 4)


def df0(x):
    return np.exp(-x - x ** 2 / 4) * (3 * np.cos(3 * x) - (1 + x / 2) * np.sin(3 * x))


def shift_pair_rhs(x):
    return df0(x + 1) + df0(x - 1)


SHIFT_PAIR = TranslationDifferentialForm.from_terms([(1, [0, 1]), (-1, [0, 1])])


# --- samples ------------------------------------------------------------------

def test_signal_validation():
    with pytest.raises(BadRange):
        SampledSignal(0, 0.1, np.ones(8))
    with pytest.raises(BadRange):
        SampledSignal(0, -0.1, np.ones(32))
    with pytest.raises(BadRange):
        SampledSignal(0, 0.1, np.r_[np.ones(31), np.nan])


def test_signal_csv_roundtrip(tmp_path):
    s = SampledSignal.from_function(lambda x: np.exp(1j * x), -1, 1, 0.1)
    p = tmp_path / "s.csv"
    s.to_csv(p)
    t = SampledSignal.from_csv(p)
    assert t.n == s.n and abs(t.dx - s.dx) < 1e-15
    assert np.array_equal(t.values, s.values)


def test_signal_csv_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b,c\n")
    with pytest.raises(FormatError):
        SampledSignal.from_csv(p)
    rows = "\n".join(f"{x},{1},{0}" for x in np.r_[np.arange(20), 25.0])
    p.write_text("x,re,im\n" + rows + "\n")
    with pytest.raises(FormatError):
        SampledSignal.from_csv(p)


# --- abscissas ----------------------------------------------------------------

def test_abscissas_two_sided_exponential():
    a = estimate_decay_abscissas(SampledSignal.from_function(lambda x: np.exp(-np.abs(x)), -20, 20, 0.01))
    assert abs(a.X_plus + 1) < 0.05 and abs(a.X_minus - 1) < 0.05


def test_abscissas_band_limited_pulse():
    a = estimate_decay_abscissas(SampledSignal.from_function(lambda x: np.sinc(x / np.pi), -200, 200, 0.5))
    assert abs(a.X_plus) < 0.05 and abs(a.X_minus) < 0.05


def test_abscissas_tapered_growth():
    a = estimate_decay_abscissas(SampledSignal.from_function(lambda x: np.exp(2 * x - x ** 2 / 100), -5, 5, 0.01))
    assert abs(a.X_plus - 2) < 0.1


def test_abscissas_errors_and_zero_tail():
    with pytest.raises(TailTooShort):
        estimate_decay_abscissas(SampledSignal(0, 1, np.ones(100)))
    z = SampledSignal.from_function(lambda x: np.where(np.abs(x) < 1, 1.0, 0.0), -10, 10, 0.05)
    a = estimate_decay_abscissas(z)
    assert a.X_plus == -50 and a.X_minus == 50 and len(a.warnings) == 2


# --- strip check --------------------------------------------------------------

def test_strip_examples():
    assert strip_min_check("z^2+1", -0.5, 0.5, 2, 200).epsilon >= 3 - 1e-12
    assert strip_min_check("2*z*cosh(z)", 0.1, 0.5, 1, 200).epsilon > 2 * 0.1 * np.sinh(0.1)
    with pytest.raises(StripViolation):
        strip_min_check("2*z*cosh(z)", -0.5, 0.5, 1, 200)


def test_strip_config_validation():
    with pytest.raises(BadRange):
        StripConfig(1.0, 0.0, 0.5, -0.5, 1, 1)
    with pytest.raises(BadRange):
        strip_min_check("z", 0, 1, 5, 2)


# --- FFT solver ---------------------------------------------------------------

def test_identity_symbol():
    g = SampledSignal.from_function(lambda x: np.exp(-x ** 2) * np.cos(3 * x), -12, 12, 2.0 ** -7)
    cfg = make_strip_config("1", g, -0.3, 0.3, Y0=2, Y_max=300)
    s = fft_solve("1", g, cfg).signal
    i = int(round((g.x0 - s.x0) / g.dx))
    assert np.abs(s.values[i:i + g.n] - g.values).max() < 1e-12


def test_gaussian_ode_after_deflation():
    g = gaussian_fixture()
    cfg = make_strip_config("z^2+1", g, -0.3, 0.3, Y0=2)
    s = fft_solve("z^2+1", g, cfg).signal
    m = np.abs(s.x) <= 6
    x = s.x[m]
    A = np.stack([np.exp(1j * x), np.exp(-1j * x)], axis=1)
    r = s.values[m] - np.exp(-x ** 2)
    c, *_ = np.linalg.lstsq(A, r, rcond=None)
    assert np.linalg.norm(r - A @ c) / np.linalg.norm(np.exp(-x ** 2)) < 1e-3


def test_shift_pair_forward_residual():
    g = SampledSignal.from_function(shift_pair_rhs, -12, 12, 2.0 ** -6)
    cfg = make_strip_config("2*z*cosh(z)", g, 0.2, 0.6, Y0=1)
    s = fft_solve("2*z*cosh(z)", g, cfg).signal
    assert translation_residual(SHIFT_PAIR, s, shift_pair_rhs) < 5e-3


def test_linearity():
    g1 = gaussian_fixture()
    g2 = SampledSignal.from_function(lambda x: np.exp(-(x - 1) ** 2) * np.sin(2 * x), -12, 12, 2.0 ** -7)
    cfg = make_strip_config("z^2+1", g1, -0.3, 0.3, Y0=2)
    a, b = 0.7, -1.3 + 0.4j
    both = SampledSignal(g1.x0, g1.dx, a * g1.values + b * g2.values)
    lhs = fft_solve("z^2+1", both, cfg).signal.values
    rhs = a * fft_solve("z^2+1", g1, cfg).signal.values + b * fft_solve("z^2+1", g2, cfg).signal.values
    assert np.abs(lhs - rhs).max() < 1e-10


def test_zero_on_line_rejected():
    g = gaussian_fixture()
    cfg = StripConfig(-50, 50, 1.0, -0.3, 2, 1.0)
    with pytest.raises(StripViolation):
        fft_solve("z-1", g, cfg)


def test_fd_derivative():
    x = np.linspace(0, 1, 201)
    d = fd_derivative(np.sin(x), x[1] - x[0])
    assert np.abs(d[4:-4] - np.cos(x[4:-4])).max() < 1e-12


# --- rectangle contour --------------------------------------------------------

COS = SampledSignal.from_function(np.cos, -30, 30, 0.01)
XS = np.linspace(-3, 3, 31)


def test_sampled_borel_matches_closed_form():
    B = SampledBorel(COS)
    z = np.array([1 + 5j, -1 - 3j, 0.5 + 20j, -0.5 - 20j])
    assert np.abs(B(z) - z / (z ** 2 + 1)).max() < 1e-4


def test_box_shift():
    f = box_contour_solve("exp(z)", COS, 20.0)
    assert np.abs(f(XS) - np.cos(XS - 1)).max() < 1e-4


def test_box_identity():
    f = box_contour_solve("1", COS, 20.0)
    assert np.abs(f(XS) - np.cos(XS)).max() < 1e-4


def test_box_encloses_symbol_zeros():
    # zeros +-2i of z^2+4 lie inside the box and add -cos(2x)/3
    f = box_contour_solve("z^2+4", COS, 20.0)(XS)
    assert np.abs(f - (np.cos(XS) - np.cos(2 * XS)) / 3).max() < 1e-4
    A = np.stack([np.exp(2j * XS), np.exp(-2j * XS)], axis=1)
    c, *_ = np.linalg.lstsq(A, f - np.cos(XS) / 3, rcond=None)
    assert np.abs(f - A @ c - np.cos(XS) / 3).max() < 1e-4


def test_box_closed_form_borel():
    f = box_contour_solve("z^2+4", borel_exppoly(exppoly_cos()), 20.0)
    assert np.abs(f(XS) - (np.cos(XS) - np.cos(2 * XS)) / 3).max() < 1e-9


def test_box_errors():
    with pytest.raises(ZeroOnContour):
        box_contour_solve("z-1", COS, 20.0)
    with pytest.raises(BadRange):
        box_contour_solve("1", COS, 20.0, xi_minus=0.5)


@settings(max_examples=10, deadline=None)
@given(shift=st.floats(-1.5, 1.5))
def test_box_shift_property(shift):
    f = box_contour_solve(f"exp({shift!r}*z)", COS, 20.0)
    assert np.abs(f(XS) - np.cos(XS - shift)).max() < 1e-4
