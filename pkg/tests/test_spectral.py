import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.integrate import quad

from conftest import gaussian_spectrum
from polsqueeze.errors import GridMismatchError, InputError, SpectrumParseError
from polsqueeze.pulse import TimeGrid, make_sech_pulse, propagate, spectrum
from polsqueeze.spectral import (
    Spectrum,
    load_spectrometer_file,
    predicted_visibility,
    resample,
    rms_width,
    spectral_overlap,
    write_spectrometer_file,
)

OMEGA = np.linspace(-30.0, 30.0, 6001)


def quad_overlap(fp, fs, lo, hi):
    """Continuous overlap bound by adaptive quadrature; independent of the grid code path."""
    kw = dict(epsabs=0, epsrel=1e-12, limit=200)
    num = quad(lambda w: math.sqrt(fp(w) * fs(w)), lo, hi, **kw)[0]
    ep = quad(fp, lo, hi, **kw)[0]
    es = quad(fs, lo, hi, **kw)[0]
    return num / (0.5 * (ep + es))


def test_identical_spectra_give_exactly_one():
    s = gaussian_spectrum(OMEGA, 1.0, 2.0)
    assert spectral_overlap(s, s).v_max == 1.0


def test_identical_pulse_spectra_give_exactly_one(fiber):
    p = make_sech_pulse(14.6e-12, 120e-15, 810e-9, TimeGrid(2048, 5e-12))
    s = spectrum(propagate(p, fiber, 200))
    t = Spectrum(s.omega.copy(), s.density.copy())
    assert spectral_overlap(s, t).v_max == 1.0


@pytest.mark.parametrize("seed", range(20))
def test_gaussian_offset_closed_form(seed):
    rng = np.random.default_rng(seed)
    sigma = rng.uniform(0.5, 3.0)
    delta = rng.uniform(0.0, 4.0) * sigma
    omega = np.linspace(-14 * sigma, delta + 14 * sigma, 8001)
    sp = gaussian_spectrum(omega, 0.0, sigma)
    ss = gaussian_spectrum(omega, delta, sigma)
    expected = math.exp(-(delta**2) / (8 * sigma**2))
    assert spectral_overlap(sp, ss).v_max == pytest.approx(expected, abs=1e-9)
    oracle = quad_overlap(
        lambda w: math.exp(-(w**2) / (2 * sigma**2)),
        lambda w: math.exp(-((w - delta) ** 2) / (2 * sigma**2)),
        omega[0], omega[-1],
    )
    assert oracle == pytest.approx(expected, abs=1e-9)


def test_gaussian_offset_two_sigma():
    sp = gaussian_spectrum(OMEGA, -1.0, 1.0)
    ss = gaussian_spectrum(OMEGA, 1.0, 1.0)
    assert spectral_overlap(sp, ss).v_max == pytest.approx(math.exp(-0.5), abs=1e-9)
    assert round(spectral_overlap(sp, ss).v_max, 4) == 0.6065


def test_disjoint_supports():
    d1 = np.where(OMEGA < -1, 1.0, 0.0)
    d2 = np.where(OMEGA > 1, 1.0, 0.0)
    assert spectral_overlap(Spectrum(OMEGA, d1), Spectrum(OMEGA, d2)).v_max == 0.0


@pytest.mark.parametrize("rho", [0.01, 0.25, 1.0, 1.0526, 3.0, 100.0])
def test_energy_ratio(rho):
    s = gaussian_spectrum(OMEGA, 0.0, 2.0)
    t = Spectrum(OMEGA, rho * s.density)
    assert spectral_overlap(s, t).v_max == pytest.approx(2 * math.sqrt(rho) / (1 + rho), abs=1e-9)


def test_grid_mismatch():
    s = gaussian_spectrum(OMEGA, 0.0, 2.0)
    t = gaussian_spectrum(OMEGA * 1.01, 0.0, 2.0)
    with pytest.raises(GridMismatchError):
        spectral_overlap(s, t)
    with pytest.raises(GridMismatchError):
        spectral_overlap(s, gaussian_spectrum(OMEGA[:-1], 0.0, 2.0))


def test_all_zero_spectrum_rejected():
    with pytest.raises(InputError):
        Spectrum(OMEGA, np.zeros_like(OMEGA))


def test_nonuniform_grid_rejected():
    w = np.sort(np.random.default_rng(0).uniform(0, 1, 50))
    with pytest.raises(InputError):
        Spectrum(w, np.ones(50))


densities = arrays(float, 64, elements=st.floats(0.0, 1e3)).filter(lambda d: d.max() > 1e-3)


@settings(max_examples=200)
@given(densities, densities, st.floats(1e-6, 1e6))
def test_overlap_properties(d1, d2, scale):
    w = np.arange(64.0)
    a, b = Spectrum(w, d1), Spectrum(w, d2)
    v = spectral_overlap(a, b).v_max
    assert 0.0 <= v <= 1.0
    assert spectral_overlap(b, a).v_max == pytest.approx(v, abs=1e-12)
    scaled = spectral_overlap(Spectrum(w, scale * d1), Spectrum(w, scale * d2)).v_max
    assert scaled == pytest.approx(v, abs=1e-12)


@settings(max_examples=100)
@given(densities, st.floats(1e-4, 1e4))
def test_shape_identical_closed_form(d, c):
    w = np.arange(64.0)
    v = spectral_overlap(Spectrum(w, d), Spectrum(w, c * d)).v_max
    assert v == pytest.approx(2 * math.sqrt(c) / (1 + c), abs=1e-9)


# -- files --------------------------------------------------------------------


def test_two_line_file(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("800 1.0\n820 1.0\n")
    s = load_spectrometer_file(path)
    np.testing.assert_allclose(s.omega, [2297136057693723.5, 2354564459136066.5], rtol=1e-15)
    # I(lambda) lambda^2 / (2 pi c): the 820 nm end is the low-frequency end
    np.testing.assert_allclose(s.density, [3.56966230734832e-22, 3.3976559736807325e-22], rtol=1e-14)
    assert s.n_clamped == 0


def test_header_lines_are_skipped(tmp_path):
    plain = tmp_path / "a.txt"
    plain.write_text("800 1.0\n820 1.0\n")
    commented = tmp_path / "b.txt"
    commented.write_text("# spectrometer dump\n# wavelength_nm intensity\n800 1.0\n\n820 1.0\n")
    a, b = load_spectrometer_file(plain), load_spectrometer_file(commented)
    np.testing.assert_array_equal(a.omega, b.omega)
    np.testing.assert_array_equal(a.density, b.density)


def test_negative_intensity_is_clamped(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("800 1.0\n805 -0.2\n810 1.0\n815 0.5\n")
    s = load_spectrometer_file(path)
    assert s.n_clamped == 1
    assert np.all(s.density >= 0)


def test_decreasing_wavelengths_accepted(tmp_path):
    up, down = tmp_path / "up.txt", tmp_path / "down.txt"
    up.write_text("800 1.0\n810 2.0\n820 1.0\n")
    down.write_text("820 1.0\n810 2.0\n800 1.0\n")
    np.testing.assert_array_equal(load_spectrometer_file(up).density, load_spectrometer_file(down).density)


@pytest.mark.parametrize(
    "text, line",
    [
        ("800 1.0\n810 abc\n", 2),
        ("# h\n800 1.0\n810\n", 3),
        ("800 1.0 3.0\n", 1),
        ("800 1.0\n-5 1.0\n", 2),
    ],
)
def test_parse_error_names_line(tmp_path, text, line):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(SpectrumParseError) as info:
        load_spectrometer_file(path)
    assert info.value.line == line
    assert f"bad.txt:{line}" in str(info.value)


def test_non_monotone_wavelengths(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("800 1.0\n810 1.0\n805 1.0\n")
    with pytest.raises(SpectrumParseError) as info:
        load_spectrometer_file(path)
    assert info.value.line == 3


def test_missing_file(tmp_path):
    with pytest.raises(SpectrumParseError):
        load_spectrometer_file(tmp_path / "nope.txt")


def test_round_trip_preserves_overlap(tmp_path, fiber):
    grid = TimeGrid(2048, 5e-12)
    sa = spectrum(propagate(make_sech_pulse(14.6e-12, 120e-15, 810e-9, grid), fiber, 200))
    sb = spectrum(propagate(make_sech_pulse(13.0e-12, 120e-15, 810e-9, grid), fiber, 200))
    path = tmp_path / "a.txt"
    write_spectrometer_file(sa, path)
    reloaded = load_spectrometer_file(path)
    third = resample(sb, reloaded.omega)
    before = spectral_overlap(sa, sb).v_max
    after = spectral_overlap(reloaded, third).v_max
    assert abs(after - before) < 1e-6


# -- visibility and widths ---------------------------------------------------


@pytest.mark.parametrize(
    "v_max, kappa, expected",
    [(0.97, 1.0, 0.97), (0.98, 0.95, 0.931), (0.0, 0.9, 0.0), (1.0, 1.0, 1.0)],
)
def test_predicted_visibility(v_max, kappa, expected):
    assert predicted_visibility(v_max, kappa) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("v_max, kappa", [(1.1, 0.9), (-0.1, 0.9), (0.5, 0.0), (0.5, 1.2)])
def test_predicted_visibility_range(v_max, kappa):
    with pytest.raises(InputError):
        predicted_visibility(v_max, kappa)


@pytest.mark.parametrize("sigma", [0.3, 1.0, 2.5])
def test_rms_width_gaussian(sigma):
    s = gaussian_spectrum(OMEGA, 0.7, sigma)
    # oracle: second moment by adaptive quadrature
    f = lambda w: math.exp(-((w - 0.7) ** 2) / (2 * sigma**2))
    m0 = quad(f, -30, 30, epsabs=0, epsrel=1e-12)[0]
    m2 = quad(lambda w: (w - 0.7) ** 2 * f(w), -30, 30, epsabs=0, epsrel=1e-12)[0]
    assert math.sqrt(m2 / m0) == pytest.approx(sigma, rel=1e-10)
    assert rms_width(s) == pytest.approx(sigma, rel=1e-8)


def test_rms_width_single_bin():
    d = np.zeros_like(OMEGA)
    d[1234] = 5.0
    assert rms_width(Spectrum(OMEGA * 1e12 + 2.3e15, d)) == 0.0
    assert rms_width(Spectrum(np.array([1.0]), np.array([2.0]))) == 0.0


def test_rms_width_scale_invariant():
    s = gaussian_spectrum(OMEGA, 0.0, 1.3)
    assert rms_width(Spectrum(OMEGA, 42.0 * s.density)) == pytest.approx(rms_width(s), rel=1e-13)
