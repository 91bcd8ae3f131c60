"""Peak readouts (position, FWHM, asymmetry, amplitude) and power extrapolation."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from scipy.optimize import curve_fit

from .exceptions import IncompletePeakError, NoPeakError, RankDeficiencyError, ValidationError
from .spectrum import Spectrum


@dataclass(frozen=True)
class PeakFeatures:
    position: float
    fwhm: float
    asymmetry: float
    amplitude: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PeakFeatures":
        return cls(**{k: float(data[k]) for k in ("position", "fwhm", "asymmetry", "amplitude")})


def _parabola_vertex(x, y):
    """Vertex of the parabola through three (x, y) samples."""
    x0, x1, x2 = x
    y0, y1, y2 = y
    # Newton divided differences; valid for uneven spacing
    d01 = (y1 - y0) / (x1 - x0)
    d12 = (y2 - y1) / (x2 - x1)
    c = (d12 - d01) / (x2 - x0)
    if c >= 0:
        return x1, y1
    b = d01 - c * (x0 + x1)
    xv = -b / (2 * c)
    yv = y0 + d01 * (xv - x0) + c * (xv - x0) * (xv - x1)
    return xv, yv


def _crossing(x, y, i_out, i_in, level):
    # linear interpolation between a sample below and one at/above level
    return x[i_out] + (level - y[i_out]) * (x[i_in] - x[i_out]) / (y[i_in] - y[i_out])


def extract_features(s: Spectrum) -> PeakFeatures:
    """Read peak position, FWHM, asymmetry and amplitude off a single-peak spectrum.

    The position and amplitude come from the parabola through the three
    samples around the discrete maximum. The half-maximum crossings are
    located by linear interpolation walking outward from the maximum, and
    asymmetry is the left half-width divided by the right half-width.

    Raises
    ------
    NoPeakError
        If the maximum is on the first or last sample.
    IncompletePeakError
        If the signal never drops below half maximum on one side.
    """
    x, y = s.wavenumbers, s.intensities
    k = int(np.argmax(y))
    if k == 0 or k == len(y) - 1:
        raise NoPeakError("spectrum maximum lies at an endpoint")
    pos, amp = _parabola_vertex(x[k - 1 : k + 2], y[k - 1 : k + 2])
    if not amp > 0:
        raise NoPeakError("peak amplitude is not positive")
    half = 0.5 * amp

    below = np.flatnonzero(y[:k] < half)
    if below.size == 0:
        raise IncompletePeakError("no half-maximum crossing on the low-shift side")
    i = below[-1]
    left = _crossing(x, y, i, i + 1, half)

    below = np.flatnonzero(y[k + 1 :] < half)
    if below.size == 0:
        raise IncompletePeakError("no half-maximum crossing on the high-shift side")
    j = k + 1 + below[0]
    right = _crossing(x, y, j, j - 1, half)

    return PeakFeatures(
        position=float(pos),
        fwhm=float(right - left),
        asymmetry=float((pos - left) / (right - pos)),
        amplitude=float(amp),
    )


def lorentzian(x, amplitude, center, fwhm, offset=0.0):
    hw = 0.5 * fwhm
    return amplitude / (1.0 + ((x - center) / hw) ** 2) + offset


def fit_lorentzian(s: Spectrum) -> Tuple[float, float, float, float]:
    """Least-squares Lorentzian + constant; returns (amplitude, center, fwhm, offset)."""
    f = extract_features(s)
    p0 = (f.amplitude, f.position, f.fwhm, 0.0)
    popt, _ = curve_fit(lorentzian, s.wavenumbers, s.intensities, p0=p0, maxfev=10000)
    amp, center, fwhm, offset = map(float, popt)
    return amp, center, abs(fwhm), offset


class PowerSeries:
    """(delivered power in uW, value) pairs with at least two distinct powers."""

    def __init__(self, entries: Sequence[Tuple[float, float]]):
        arr = np.asarray(list(entries), dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
            raise ValidationError("power series needs at least 2 (power, value) pairs")
        p = arr[:, 0]
        if np.any(p <= 0):
            raise ValidationError("powers must be strictly positive")
        if np.unique(p).size != p.size:
            if np.unique(p).size == 1:
                raise RankDeficiencyError("all powers are equal; slope is undefined")
            raise ValidationError("powers must be pairwise distinct")
        self.powers = p
        self.values = arr[:, 1]

    def __len__(self):
        return self.powers.size

    @classmethod
    def from_arrays(cls, powers, values):
        return cls(zip(powers, values))


class LineFit(NamedTuple):
    slope: float
    intercept: float
    residual_rms: float


def fit_feature_vs_power(series: PowerSeries) -> LineFit:
    """Ordinary least-squares line of a feature against excitation power.

    The intercept is the zero-power estimate of the feature, i.e. the value
    with laser heating extrapolated away.
    """
    p, v = series.powers, series.values
    pm, vm = p.mean(), v.mean()
    dp = p - pm
    sxx = float(dp @ dp)
    if sxx == 0:
        raise RankDeficiencyError("all powers are equal; slope is undefined")
    slope = float(dp @ (v - vm)) / sxx
    intercept = vm - slope * pm
    resid = v - (intercept + slope * p)
    return LineFit(slope, float(intercept), float(np.sqrt(np.mean(resid**2))))
