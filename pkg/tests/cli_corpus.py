"""Synthetic input corpus for the command-line tests."""

import json
import math

import numpy as np

from nanoraman import DiameterDistribution, MeasurementMeta, Spectrum, save_spectrum, simulate_spectrum
from nanoraman.spectrum import save_meta

from conftest import lorentz

FIT_GRID = np.arange(260.0, 310.0 + 1e-9, 0.25)
BAND = np.arange(280.0, 320.0, 0.1)
SOURCE_UW = 500.0
ODS = (0.0, 0.3, 0.6)


def write_fit_inputs(root):
    save_spectrum(simulate_spectrum(FIT_GRID, 8.0), root / "d8.txt")
    save_spectrum(simulate_spectrum(FIT_GRID, DiameterDistribution.interval(4.0, 5.0)), root / "d4_5.txt")
    x = np.arange(280.0, 320.0, 0.1)
    save_spectrum(Spectrum(x, lorentz(x, 300.5, 3.0, 100.0)), root / "bulk.txt")


def write_manifest(root, name, ln_ratio_slope, intercept=-1.5, ods=ODS):
    """Stokes pairs whose ln(anti-Stokes/Stokes) is linear in delivered power."""
    entries = []
    stokes = lorentz(BAND, 300.5, 3.0, 100.0)
    for od in ods:
        meta = MeasurementMeta(514.523, SOURCE_UW, od, label=f"{name} OD{od}")
        power = meta.delivered_power_uW
        ratio = math.exp(intercept + ln_ratio_slope * power)
        s_file, a_file = f"{name}_od{od}_s.txt", f"{name}_od{od}_as.txt"
        save_spectrum(Spectrum(BAND, stokes), root / s_file)
        save_spectrum(Spectrum(-BAND[::-1], (ratio * stokes)[::-1]), root / a_file)
        entries.append({"stokes_file": s_file, "antistokes_file": a_file, "meta": meta.to_dict()})
    path = root / f"{name}.json"
    path.write_text(json.dumps(entries, indent=2))
    return path


def write_power_series(root, positions=(299.0, 298.0, 296.0), powers=(125.0, 250.0, 500.0)):
    paths = []
    for pos, p in zip(positions, powers):
        path = root / f"p{int(p)}.txt"
        save_spectrum(Spectrum(BAND, lorentz(BAND, pos, 3.0, 50.0)), path)
        save_meta(MeasurementMeta(514.523, p), path.with_suffix(".json"))
        paths.append(path)
    return paths
