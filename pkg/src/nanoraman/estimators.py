"""scikit-learn compatible wrappers around the functional API."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .diameter import (
    CurveCache,
    fit_grid_distribution,
    fit_interval_distribution,
    fit_single_diameter,
)
from .features import PowerSeries, extract_features, fit_feature_vs_power
from .rcf import RcfParams
from .spectrum import Spectrum, subtract_baseline
from .validation import check_axis, check_spectra_matrix, check_xy_spectrum

FEATURE_NAMES = ("position", "fwhm", "asymmetry", "amplitude")


class RcfDiameterRegressor(RegressorMixin, BaseEstimator):
    """Fit a nanowire diameter distribution to a spectrum.

    ``X`` holds Raman shifts (cm^-1) and ``y`` the measured intensities.
    After ``fit``, ``predict`` evaluates ``scale * model + offset`` on any
    axis, so ``score`` is the R^2 of the lineshape fit.

    Parameters
    ----------
    kind : {"point", "interval", "grid"}
    d_range : (float, float)
        Search range in nm for point and interval fits.
    grid_nm : sequence of float, optional
        Diameter dictionary for ``kind="grid"``.
    params : RcfParams, optional
        Forward-model settings; bulk-Ge defaults when omitted.
    """

    def __init__(self, kind="point", d_range=(2.0, 30.0), grid_nm=None, params=None):
        self.kind = kind
        self.d_range = d_range
        self.grid_nm = grid_nm
        self.params = params

    def _params(self):
        return self.params if self.params is not None else RcfParams()

    def fit(self, X, y):
        spectrum = check_xy_spectrum(X, y)
        params = self._params()
        if self.kind == "point":
            report = fit_single_diameter(spectrum, params, self.d_range)
        elif self.kind == "interval":
            report = fit_interval_distribution(spectrum, params, self.d_range)
        elif self.kind == "grid":
            if self.grid_nm is None:
                raise ValueError("kind='grid' requires grid_nm")
            report = fit_grid_distribution(spectrum, params, self.grid_nm)
        else:
            raise ValueError(f"unknown kind {self.kind!r}")
        self.report_ = report
        self.distribution_ = report.distribution
        self.scale_ = report.scale
        self.offset_ = report.offset
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "report_")
        x = check_axis(X)
        order = np.argsort(x)
        curve = CurveCache(x[order], self._params()).mixture(self.distribution_)
        out = np.empty_like(x)
        out[order] = self.scale_ * curve + self.offset_
        return out


class PeakFeatureExtractor(TransformerMixin, BaseEstimator):
    """Map rows of intensities on a shared axis to peak features.

    Output columns are position, fwhm, asymmetry and amplitude.
    """

    def __init__(self, wavenumbers=None, baseline_fraction=None):
        self.wavenumbers = wavenumbers
        self.baseline_fraction = baseline_fraction

    def fit(self, X, y=None):
        self.axis_ = check_axis(self.wavenumbers, "wavenumbers")
        check_spectra_matrix(X, self.axis_.size)
        self.n_features_in_ = self.axis_.size
        return self

    def transform(self, X):
        check_is_fitted(self, "axis_")
        rows = check_spectra_matrix(X, self.axis_.size)
        out = np.empty((rows.shape[0], len(FEATURE_NAMES)))
        for i, row in enumerate(rows):
            s = Spectrum(self.axis_, row)
            if self.baseline_fraction is not None:
                s = subtract_baseline(s, self.baseline_fraction)
            f = extract_features(s)
            out[i] = (f.position, f.fwhm, f.asymmetry, f.amplitude)
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(FEATURE_NAMES, dtype=object)


class ZeroPowerExtrapolator(RegressorMixin, BaseEstimator):
    """Straight-line feature-versus-power fit; ``intercept_`` is the heating-free value."""

    def fit(self, X, y):
        power = check_axis(X)
        fit = fit_feature_vs_power(PowerSeries.from_arrays(power, np.ravel(y)))
        self.slope_ = fit.slope
        self.intercept_ = fit.intercept
        self.residual_rms_ = fit.residual_rms
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "slope_")
        return self.intercept_ + self.slope_ * check_axis(X)
