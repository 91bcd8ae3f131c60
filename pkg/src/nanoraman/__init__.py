"""Raman phonon-confinement modelling and thermometry for Ge nanowires."""

__version__ = "0.1.0"

from .diameter import (
    FitReport,
    fit_grid_distribution,
    fit_interval_distribution,
    fit_single_diameter,
)
from .distribution import DiameterDistribution
from .estimators import PeakFeatureExtractor, RcfDiameterRegressor, ZeroPowerExtrapolator
from .features import PeakFeatures, PowerSeries, extract_features, fit_feature_vs_power
from .rcf import (
    ModelSpectrumRequest,
    RcfParams,
    calibrate_C,
    confinement_weight,
    dispersion_omega,
    rcf_intensity,
    simulate_spectrum,
)
from .spectrum import (
    MeasurementMeta,
    Spectrum,
    crop_window,
    load_spectrum,
    normalize_peak,
    save_spectrum,
    subtract_baseline,
)
from .thermal import (
    KappaEstimate,
    StokesPair,
    equivalent_absorbed_power,
    fit_ratio_slope,
    relative_kappa,
    stokes_antistokes_ratio,
    temperature_from_ratio,
)
