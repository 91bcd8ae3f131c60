import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nanoraman import PowerSeries, Spectrum, extract_features, fit_feature_vs_power, simulate_spectrum
from nanoraman.exceptions import IncompletePeakError, NoPeakError, RankDeficiencyError, ValidationError
from nanoraman.features import PeakFeatures, fit_lorentzian

from conftest import lorentz


def test_lorentzian_features(lorentz_spectrum):
    f = extract_features(lorentz_spectrum)
    assert f.position == pytest.approx(300.5, abs=0.01)
    assert f.fwhm == pytest.approx(3.0, abs=0.05)
    assert f.asymmetry == pytest.approx(1.0, abs=0.02)
    assert f.amplitude == pytest.approx(1.0, abs=1e-3)


def test_off_grid_lorentzian():
    x = np.arange(280.0, 320.0, 0.1)
    f = extract_features(Spectrum(x, lorentz(x, 300.537, 3.0, 7.0)))
    assert f.position == pytest.approx(300.537, abs=0.01)
    assert f.fwhm == pytest.approx(3.0, abs=0.05)
    assert f.amplitude == pytest.approx(7.0, rel=1e-3)


def test_mirror_reflection():
    x = np.arange(200.0, 320.0, 0.1)
    s = simulate_spectrum(x, 6.0)
    mirrored = Spectrum(-x[::-1], s.intensities[::-1])
    f, g = extract_features(s), extract_features(mirrored)
    assert g.position == pytest.approx(-f.position, abs=1e-9)
    assert g.asymmetry == pytest.approx(1 / f.asymmetry, rel=1e-9)
    assert g.fwhm == pytest.approx(f.fwhm, rel=1e-9)


def test_confined_spectrum_asymmetric():
    f = extract_features(simulate_spectrum(np.arange(200.0, 320.0, 0.05), 5.0))
    assert f.asymmetry > 1.0


def test_maximum_at_endpoint():
    x = np.arange(20.0)
    with pytest.raises(NoPeakError):
        extract_features(Spectrum(x, x))


def test_flat_spectrum_no_peak():
    with pytest.raises(NoPeakError):
        extract_features(Spectrum(np.arange(20.0), np.ones(20)))


def test_incomplete_peak():
    x = np.arange(290.0, 310.0, 0.5)
    y = lorentz(x, 291.0, 10.0)
    with pytest.raises(IncompletePeakError):
        extract_features(Spectrum(x, y))


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-3, 1e6), st.floats(295, 305), st.floats(1.0, 10.0))
def test_intensity_scaling(k, c, w):
    x = np.arange(270.0, 330.0, 0.2)
    s = Spectrum(x, lorentz(x, c, w) * (1 + 0.2 * (x < c)))
    f, g = extract_features(s), extract_features(Spectrum(x, k * s.intensities))
    assert g.position == pytest.approx(f.position, rel=1e-12)
    assert g.fwhm == pytest.approx(f.fwhm, rel=1e-9)
    assert g.asymmetry == pytest.approx(f.asymmetry, rel=1e-9)
    assert g.amplitude == pytest.approx(k * f.amplitude, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(-200, 200))
def test_translation_equivariance(delta):
    x = np.arange(270.0, 330.0, 0.25)
    y = lorentz(x, 299.87, 4.0) * (1 + 0.3 * (x < 299.87))
    f, g = extract_features(Spectrum(x, y)), extract_features(Spectrum(x + delta, y))
    assert g.position == pytest.approx(f.position + delta, abs=1e-9)
    assert g.fwhm == pytest.approx(f.fwhm, abs=1e-9)
    assert g.asymmetry == pytest.approx(f.asymmetry, rel=1e-7)


def test_position_error_quadratic_in_spacing():
    center = 300.537
    errors = []
    for h in (0.4, 0.2, 0.1):
        x = 280.0 + h * np.arange(int(round(40 / h)) + 1)
        errors.append(abs(extract_features(Spectrum(x, lorentz(x, center, 3.0))).position - center))
    assert errors[1] <= errors[0] / 4
    assert errors[2] <= errors[1] / 4


def test_features_dict_round_trip():
    f = PeakFeatures(300.1, 3.2, 1.1, 5.0)
    assert PeakFeatures.from_dict(f.to_dict()) == f
    assert set(f.to_dict()) == {"position", "fwhm", "asymmetry", "amplitude"}


def test_fit_lorentzian_recovers_width():
    x = np.arange(280.0, 320.0, 0.1)
    amp, center, fwhm, offset = fit_lorentzian(Spectrum(x, lorentz(x, 300.2, 3.3, 10.0) + 2.0))
    assert (amp, center, fwhm, offset) == pytest.approx((10.0, 300.2, 3.3, 2.0), rel=1e-6)


# ---- zero-power extrapolation ----------------------------------------------


def test_collinear_three_points():
    fit = fit_feature_vs_power(PowerSeries([(125, 299.0), (250, 298.0), (500, 296.0)]))
    assert fit.slope == pytest.approx(-0.008, rel=1e-12)
    assert fit.intercept == pytest.approx(300.0, rel=1e-12)
    assert fit.residual_rms == pytest.approx(0.0, abs=1e-12)


def test_two_points_interpolate():
    fit = fit_feature_vs_power(PowerSeries([(100, 5.0), (300, 4.0)]))
    assert fit.slope == pytest.approx(-0.005)
    assert fit.intercept == pytest.approx(5.5)
    assert fit.residual_rms == pytest.approx(0.0, abs=1e-14)


@settings(max_examples=100)
@given(
    st.floats(-10, 10),
    st.floats(-1e3, 1e3),
    st.lists(st.floats(1, 1e3), min_size=2, max_size=10, unique=True),
)
def test_collinear_exact(slope, intercept, powers):
    if max(powers) - min(powers) < 1e-3 * max(powers):
        return
    values = [intercept + slope * p for p in powers]
    fit = fit_feature_vs_power(PowerSeries.from_arrays(powers, values))
    scale = abs(intercept) + abs(slope) * max(powers)
    assert abs(fit.slope - slope) * max(powers) <= 1e-12 * scale * 10
    assert abs(fit.intercept - intercept) <= 1e-12 * scale * 10


def test_equal_powers_rank_deficient():
    with pytest.raises(RankDeficiencyError):
        fit_feature_vs_power(PowerSeries([(250, 1.0), (250, 2.0)]))


def test_series_validation():
    with pytest.raises(ValidationError):
        PowerSeries([(250, 1.0)])
    with pytest.raises(ValidationError):
        PowerSeries([(-1, 1.0), (2, 1.0)])
    with pytest.raises(ValidationError):
        PowerSeries([(1, 1.0), (2, 1.0), (1, 3.0)])


def test_intercept_coverage_monte_carlo():
    rng = np.random.default_rng(20240501)
    powers = np.array([125.0, 250.0, 500.0])
    sigma = 0.2
    sxx = np.sum((powers - powers.mean()) ** 2)
    se = sigma * np.sqrt(1 / powers.size + powers.mean() ** 2 / sxx)
    hits = 0
    for _ in range(1000):
        values = 300.0 - 0.008 * powers + rng.normal(0, sigma, powers.size)
        fit = fit_feature_vs_power(PowerSeries.from_arrays(powers, values))
        hits += abs(fit.intercept - 300.0) <= 3 * se
    assert hits >= 990
