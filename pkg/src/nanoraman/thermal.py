"""Stokes/anti-Stokes thermometry and bulk-relative thermal conductivity.

The anti-Stokes/Stokes intensity ratio follows a Boltzmann factor
``gamma * exp(-nu / (k_B T))``. Only differences of ``ln(ratio)`` between
excitation powers enter the conductivity estimate, so ``gamma`` cancels
there.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Mapping, Optional

import numpy as np

from .exceptions import DomainError, NonPhysicalRatioError, TableLookupError, ValidationError
from .features import PowerSeries, extract_features, fit_feature_vs_power
from .spectrum import MeasurementMeta, Spectrum, mirror_antistokes

K_B_CM = 0.695035  # Boltzmann constant, cm^-1 / K
KAPPA_BULK_GE = 59.9  # W/(m K), intrinsic bulk Ge
REFERENCE_WAVELENGTH_NM = 514.523

CONVENTIONS = ("boltzmann", "paper_linear")


def wavelength_key(wavelength_nm: float) -> str:
    return f"{float(wavelength_nm):.3f}"


def load_absorption_table(path=None) -> dict:
    """Absorption coefficients (cm^-1) keyed by 3-decimal wavelength strings.

    Without ``path`` the bundled Ge table is returned.
    """
    if path is None:
        text = resources.files("nanoraman").joinpath("data/absorption.json").read_text()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return normalize_absorption_table(json.loads(text))


def normalize_absorption_table(table: Mapping) -> dict:
    out = {}
    for k, v in table.items():
        alpha = float(v)
        if not alpha > 0:
            raise ValidationError(f"absorption coefficient for {k} must be > 0")
        out[wavelength_key(float(k))] = alpha
    return out


@dataclass(frozen=True)
class StokesPair:
    """Stokes and anti-Stokes bands of one measurement.

    The anti-Stokes band is mirrored to positive shifts on construction.
    """

    stokes: Spectrum
    antistokes: Spectrum
    meta: Optional[MeasurementMeta] = None

    def __post_init__(self):
        object.__setattr__(self, "antistokes", mirror_antistokes(self.antistokes))


def boltzmann_ratio(temperature_K, nu_tilde, gamma_coeff=1.0):
    """Anti-Stokes/Stokes ratio ``gamma * exp(-nu / (k_B T))``."""
    return gamma_coeff * np.exp(-nu_tilde / (K_B_CM * np.asarray(temperature_K, dtype=float)))


def stokes_antistokes_ratio(pair: StokesPair) -> float:
    """Integrated anti-Stokes band area over integrated Stokes band area."""
    # both bands must carry a readable peak
    extract_features(pair.stokes)
    extract_features(pair.antistokes)
    area_s = np.trapezoid(pair.stokes.intensities, pair.stokes.wavenumbers)
    area_as = np.trapezoid(pair.antistokes.intensities, pair.antistokes.wavenumbers)
    if not area_s > 0:
        raise DomainError("Stokes band area is not positive")
    return float(area_as / area_s)


def temperature_from_ratio(ratio, nu_tilde, gamma_coeff=1.0, convention="boltzmann"):
    """Local temperature index from an anti-Stokes/Stokes ratio.

    ``boltzmann`` inverts the Boltzmann factor and returns kelvin.
    ``paper_linear`` returns ``ln(ratio)``, which is only proportional to
    temperature and is what the conductivity pipeline differences.
    """
    if convention not in CONVENTIONS:
        raise ValidationError(f"convention must be one of {CONVENTIONS}")
    if not ratio > 0:
        raise DomainError("ratio must be > 0")
    if not gamma_coeff > 0:
        raise DomainError("gamma_coeff must be > 0")
    if not nu_tilde > 0:
        raise DomainError("nu_tilde must be > 0")
    if convention == "paper_linear":
        return math.log(ratio)
    log_term = math.log(ratio / gamma_coeff)
    if not log_term < 0:
        raise NonPhysicalRatioError(
            f"ratio {ratio:g} >= gamma {gamma_coeff:g} implies a nonpositive temperature"
        )
    return -nu_tilde / (K_B_CM * log_term)


def fit_ratio_slope(series: PowerSeries) -> float:
    """Absolute OLS slope of ln(ratio) against delivered power (per uW)."""
    return abs(fit_feature_vs_power(series).slope)


@dataclass(frozen=True)
class KappaEstimate:
    kappa: float
    slope_sample: float
    slope_bulk: float
    kappa_bulk: float

    def to_dict(self) -> dict:
        return asdict(self)


def relative_kappa(r_sample: float, r_bulk: float, kappa_bulk: float = KAPPA_BULK_GE) -> KappaEstimate:
    """Thermal conductivity of a sample layer relative to bulk.

    A steeper ln-ratio-versus-power slope means more heating for the same
    absorbed power, hence lower conductivity: ``kappa = kappa_bulk * r_bulk / r_sample``.
    """
    if not r_sample > 0 or not r_bulk > 0:
        raise DomainError("slopes must be > 0")
    if not kappa_bulk > 0:
        raise DomainError("kappa_bulk must be > 0")
    return KappaEstimate(
        kappa=kappa_bulk * (r_bulk / r_sample),
        slope_sample=float(r_sample),
        slope_bulk=float(r_bulk),
        kappa_bulk=float(kappa_bulk),
    )


def equivalent_absorbed_power(
    power_uW: float,
    wavelength_nm: float,
    reference_wavelength_nm: float = REFERENCE_WAVELENGTH_NM,
    absorption_table: Optional[Mapping[str, float]] = None,
) -> float:
    """Power at the reference wavelength that deposits the same heat.

    Scales by the ratio of absorption coefficients, ``alpha(wavelength) / alpha(reference)``.
    """
    table = load_absorption_table() if absorption_table is None else absorption_table
    try:
        alpha = table[wavelength_key(wavelength_nm)]
        alpha_ref = table[wavelength_key(reference_wavelength_nm)]
    except KeyError as exc:
        raise TableLookupError(f"no absorption coefficient for {exc.args[0]} nm") from None
    return power_uW * alpha / alpha_ref
