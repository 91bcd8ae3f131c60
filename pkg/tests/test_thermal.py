import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nanoraman import (
    KappaEstimate,
    MeasurementMeta,
    PowerSeries,
    Spectrum,
    StokesPair,
    equivalent_absorbed_power,
    fit_ratio_slope,
    relative_kappa,
    stokes_antistokes_ratio,
    temperature_from_ratio,
)
from nanoraman.exceptions import (
    DomainError,
    NoPeakError,
    NonPhysicalRatioError,
    RankDeficiencyError,
    TableLookupError,
)
from nanoraman.thermal import K_B_CM, boltzmann_ratio, load_absorption_table

from conftest import lorentz

X = np.arange(280.0, 320.0, 0.1)
META = MeasurementMeta(514.523, 500.0)


def _band(scale=1.0):
    return Spectrum(X, scale * lorentz(X, 300.5, 3.0, 100.0))


def test_identical_bands_ratio_one():
    assert stokes_antistokes_ratio(StokesPair(_band(), _band(), META)) == pytest.approx(1.0, abs=1e-12)


def test_scaled_antistokes_band():
    assert stokes_antistokes_ratio(StokesPair(_band(), _band(0.25), META)) == pytest.approx(0.25, rel=1e-12)


def test_negative_shift_antistokes_is_mirrored():
    anti = Spectrum(-X[::-1], 0.5 * lorentz(X, 300.5, 3.0, 100.0)[::-1])
    pair = StokesPair(_band(), anti)
    assert pair.antistokes.wavenumbers[0] > 0
    assert stokes_antistokes_ratio(pair) == pytest.approx(0.5, rel=1e-12)


def test_boltzmann_synthesized_pair():
    # generator: anti-Stokes band = gamma * exp(-nu / (k_B T)) * Stokes band
    t, nu = 295.0, 300.5
    factor = math.exp(-nu / (0.695 * t))
    pair = StokesPair(_band(), _band(factor), META)
    assert stokes_antistokes_ratio(pair) == pytest.approx(0.231, abs=1e-3)


def test_ratio_requires_peaks():
    flat = Spectrum(X, np.ones(X.size))
    with pytest.raises(NoPeakError):
        stokes_antistokes_ratio(StokesPair(_band(), flat))


def test_temperature_from_ratio_inverse():
    ratio = math.exp(-300.5 / (K_B_CM * 295.0))
    assert ratio == pytest.approx(0.231, abs=1e-3)
    assert temperature_from_ratio(0.231, 300.5, 1.0) == pytest.approx(295.0, abs=1.0)
    assert temperature_from_ratio(ratio, 300.5, 1.0) == pytest.approx(295.0, rel=1e-12)


@pytest.mark.parametrize("nu", [100.0, 300.5, 520.0])
@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
def test_temperature_e_inverse(nu, gamma):
    assert temperature_from_ratio(gamma / math.e, nu, gamma) == pytest.approx(nu / K_B_CM, rel=1e-14)


def test_paper_linear_index():
    assert temperature_from_ratio(math.e**2, 300.5, 1.0, "paper_linear") == pytest.approx(2.0, rel=1e-15)


@pytest.mark.parametrize("ratio,gamma", [(1.0, 1.0), (1.5, 1.0), (0.6, 0.5)])
def test_nonphysical_ratio(ratio, gamma):
    with pytest.raises(NonPhysicalRatioError):
        temperature_from_ratio(ratio, 300.5, gamma)


@pytest.mark.parametrize("args", [(0.0, 300.5, 1.0), (0.2, 0.0, 1.0), (0.2, 300.5, 0.0)])
def test_temperature_domain(args):
    with pytest.raises(DomainError):
        temperature_from_ratio(*args)


@settings(max_examples=200)
@given(st.floats(250, 600), st.floats(50, 600), st.floats(0.1, 10))
def test_boltzmann_round_trip(t, nu, gamma):
    r = float(boltzmann_ratio(t, nu, gamma))
    assert temperature_from_ratio(r, nu, gamma) == pytest.approx(t, rel=1e-9)


def test_boltzmann_ratio_increasing_in_t():
    t = np.linspace(100, 1000, 500)
    assert np.all(np.diff(boltzmann_ratio(t, 300.5)) > 0)


def test_slope_absolute_value():
    p = np.array([125.0, 250.0, 500.0])
    assert fit_ratio_slope(PowerSeries.from_arrays(p, -0.002 * p + 0.7)) == pytest.approx(0.002, rel=1e-12)


def test_slope_two_points():
    assert fit_ratio_slope(PowerSeries([(125, 0.10), (500, 0.40)])) == pytest.approx(8.0e-4, rel=1e-12)


def test_slope_ordering_by_size():
    p = np.array([125.0, 250.0, 500.0])
    slopes = {"bulk": 5e-6, "20": 4e-4, "10": 8e-4, "5": 1.1e-3}
    r = {k: fit_ratio_slope(PowerSeries.from_arrays(p, -1.5 + s * p)) for k, s in slopes.items()}
    assert r["bulk"] < 1e-5
    assert r["bulk"] < r["20"] < r["10"] < r["5"]


@settings(max_examples=100)
@given(st.floats(-50, 50), st.floats(-1e-2, 1e-2))
def test_slope_shift_invariant(c, s):
    p = np.array([125.0, 250.0, 400.0, 500.0])
    base = s * p + np.array([0.001, -0.002, 0.0015, 0.0])
    a = fit_ratio_slope(PowerSeries.from_arrays(p, base))
    b = fit_ratio_slope(PowerSeries.from_arrays(p, base + c))
    assert b == pytest.approx(a, rel=1e-6, abs=1e-12)


def test_slope_rank_deficient():
    with pytest.raises(RankDeficiencyError):
        fit_ratio_slope(PowerSeries([(250, 0.1), (250, 0.2)]))


def test_kappa_identity():
    est = relative_kappa(0.003, 0.003, 59.9)
    assert est.kappa == 59.9
    assert isinstance(est, KappaEstimate)


@pytest.mark.parametrize("target", [22.8, 12.1, 9.1])
def test_kappa_published_values(target):
    r_bulk = 0.001
    est = relative_kappa(r_bulk * 59.9 / target, r_bulk, 59.9)
    assert est.kappa == pytest.approx(target, abs=1e-9)


def test_kappa_linear_in_bulk():
    assert relative_kappa(0.004, 0.001, 2 * 59.9).kappa == pytest.approx(2 * relative_kappa(0.004, 0.001, 59.9).kappa)


def test_steeper_slope_lower_kappa():
    assert relative_kappa(0.004, 0.001).kappa < relative_kappa(0.002, 0.001).kappa < 59.9


@pytest.mark.parametrize("r_s,r_b", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
def test_kappa_domain(r_s, r_b):
    with pytest.raises(DomainError):
        relative_kappa(r_s, r_b)


def test_kappa_serializes():
    assert set(relative_kappa(0.002, 0.001).to_dict()) == {"kappa", "slope_sample", "slope_bulk", "kappa_bulk"}


def test_default_absorption_table():
    assert load_absorption_table() == {"514.523": 600.0, "633.817": 150.0}


def test_equivalent_power_published_case():
    assert equivalent_absorbed_power(500.0, 633.817, 514.523) == 125.0


def test_equivalent_power_same_wavelength():
    assert equivalent_absorbed_power(321.0, 514.523, 514.523) == 321.0


def test_equivalent_power_inverse_direction():
    assert equivalent_absorbed_power(250.0, 514.523, 633.817) == pytest.approx(1000.0, rel=1e-15)


@settings(max_examples=100)
@given(st.floats(1e-3, 1e5))
def test_equivalent_power_round_trip(p):
    fwd = equivalent_absorbed_power(p, 633.817, 514.523)
    assert equivalent_absorbed_power(fwd, 514.523, 633.817) == pytest.approx(p, rel=1e-12)


def test_equivalent_power_missing_entry():
    with pytest.raises(TableLookupError):
        equivalent_absorbed_power(500.0, 488.0, 514.523)
    with pytest.raises(KeyError):
        equivalent_absorbed_power(500.0, 514.532, 514.523)
