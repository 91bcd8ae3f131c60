"""Command-line interface: ``nanoraman {simulate,fit,thermal,features}``.

Exit codes: 0 success, 2 usage or validation error, 3 computation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .diameter import fit_grid_distribution, fit_interval_distribution, fit_single_diameter
from .distribution import DiameterDistribution
from .exceptions import RamanError, TableLookupError, ValidationError
from .features import PowerSeries, extract_features, fit_feature_vs_power
from .rcf import calibrate_C, simulate_spectrum
from .spectrum import (
    MeasurementMeta,
    crop_window,
    load_meta,
    load_spectrum,
    save_spectrum,
    subtract_baseline,
)
from .thermal import (
    StokesPair,
    equivalent_absorbed_power,
    fit_ratio_slope,
    relative_kappa,
    stokes_antistokes_ratio,
    temperature_from_ratio,
    wavelength_key,
)


EXIT_OK, EXIT_USAGE, EXIT_COMPUTE = 0, 2, 3


class UsageError(Exception):
    """Bad arguments or inputs; exit code 2."""


class ComputeError(Exception):
    """Numerical step failed; exit code 3."""


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_json(obj, path: Path) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")


def _floats(text: str, n=None, sep=":"):
    try:
        vals = [float(t) for t in text.split(sep)]
    except ValueError:
        raise UsageError(f"cannot parse numbers from {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} values separated by {sep!r}, got {text!r}")
    return vals


def parse_grid(text: str) -> np.ndarray:
    """``LO:HI:STEP`` to an evenly spaced axis including both ends."""
    lo, hi, step = _floats(text, 3)
    if not (step > 0 and hi > lo):
        raise UsageError(f"grid {text!r} needs HI > LO and STEP > 0")
    n = int(round((hi - lo) / step)) + 1
    return lo + step * np.arange(n)


def parse_diameter_list(text: str) -> np.ndarray:
    if text.count(":") == 2:
        return parse_grid(text)
    return np.array(_floats(text, sep=","))


def _load(path):
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"input file not found: {p}")
    return load_spectrum(p)


def _preprocess(s, args):
    if getattr(args, "baseline", None) is not None:
        s = subtract_baseline(s, args.baseline)
    if getattr(args, "crop", None):
        lo, hi = _floats(args.crop, 2)
        s = crop_window(s, lo, hi)
    return s


def _output_dir(config: RunConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args, config: RunConfig) -> int:
    grid = parse_grid(args.grid)
    if args.d is not None:
        if not args.d > 0:
            raise UsageError(f"diameter must be > 0, got {args.d}")
        dist = DiameterDistribution.point(args.d)
    elif args.interval is not None:
        dist = DiameterDistribution.interval(*_floats(args.interval, 2))
    else:
        path = Path(args.distribution)
        if not path.is_file():
            raise UsageError(f"distribution file not found: {path}")
        dist = DiameterDistribution.from_dict(json.loads(path.read_text(encoding="utf-8")))

    spectrum = simulate_spectrum(grid, dist, config.params)
    try:
        features = extract_features(spectrum)
    except RamanError as exc:
        raise ComputeError(f"simulated spectrum has no readable peak: {exc}") from None

    out = _output_dir(config)
    save_spectrum(
        spectrum,
        out / f"{args.name}.txt",
        header=f"simulated {dist.summary()} geometry={config.params.geometry}",
    )
    write_json(
        {
            "distribution": dist.to_dict(),
            "features": features.to_dict(),
            "geometry": config.params.geometry,
            "params": config.params.to_dict(),
        },
        out / f"{args.name}_features.json",
    )
    print(
        f"{dist.summary()}: position {features.position:.3f} cm-1, "
        f"FWHM {features.fwhm:.3f} cm-1, asymmetry {features.asymmetry:.3f}"
    )
    return EXIT_OK


def cmd_fit(args, config: RunConfig) -> int:
    measured = _preprocess(_load(args.measured), args)
    params = config.params
    if args.bulk:
        bulk = _preprocess(_load(args.bulk), args)
        try:
            params = calibrate_C(bulk, params)
        except RamanError as exc:
            raise ComputeError(f"bulk calibration failed: {exc}") from None
    d_range = _floats(args.d_range, 2)
    if not 0 < d_range[0] < d_range[1]:
        raise UsageError(f"--d-range needs 0 < MIN < MAX, got {args.d_range}")

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            if args.mode == "point":
                report = fit_single_diameter(measured, params, d_range)
            elif args.mode == "interval":
                report = fit_interval_distribution(measured, params, d_range)
            else:
                if not args.grid_nm:
                    raise UsageError("--mode grid requires --grid-nm")
                report = fit_grid_distribution(measured, params, parse_diameter_list(args.grid_nm))
        except ValidationError as exc:
            raise UsageError(str(exc)) from None
        except RamanError as exc:
            raise ComputeError(f"fit failed: {exc}") from None
    notes = [str(w.message) for w in caught]
    for note in notes:
        print(f"warning: {note}", file=sys.stderr)

    doc = report.to_dict()
    doc["params"] = params.to_dict()
    doc["mode"] = args.mode
    doc["warnings"] = notes
    name = args.name or f"{Path(args.measured).stem}_fit"
    write_json(doc, _output_dir(config) / f"{name}.json")
    print(report.distribution.summary())
    return EXIT_OK


def _read_manifest(path, config: RunConfig, args):
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"manifest not found: {path}")
    try:
        entries = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(entries, list):
        raise UsageError(f"{path}: manifest must be a JSON array")
    base = path.parent
    ref_key = wavelength_key(config.reference_wavelength_nm)
    points = []
    for i, entry in enumerate(entries):
        try:
            meta = MeasurementMeta.from_dict(entry["meta"])
            stokes = _preprocess(_load(base / entry["stokes_file"]), args)
            anti = _load(base / entry["antistokes_file"])
        except KeyError as exc:
            raise UsageError(f"{path}: entry {i} lacks {exc}") from None
        pair = StokesPair(stokes, anti, meta)
        pair = StokesPair(pair.stokes, _preprocess(pair.antistokes, args), meta)
        power = meta.delivered_power_uW
        if wavelength_key(meta.wavelength_nm) != ref_key:
            try:
                power = equivalent_absorbed_power(
                    power, meta.wavelength_nm, config.reference_wavelength_nm, config.absorption_table
                )
            except TableLookupError as exc:
                raise UsageError(str(exc)) from None
        try:
            ratio = stokes_antistokes_ratio(pair)
            nu = extract_features(pair.stokes).position
        except RamanError as exc:
            raise ComputeError(f"{path}: entry {i}: {exc}") from None
        try:
            temp = temperature_from_ratio(ratio, nu, config.gamma_coeff, "boltzmann")
        except RamanError:
            temp = None
        points.append(
            {
                "label": meta.label,
                "wavelength_nm": meta.wavelength_nm,
                "delivered_power_uW": meta.delivered_power_uW,
                "absorbed_equivalent_power_uW": power,
                "ratio": ratio,
                "ln_ratio": math.log(ratio) if ratio > 0 else None,
                "nu_tilde_cm": nu,
                "temperature_K": temp,
            }
        )
    powers = {p["absorbed_equivalent_power_uW"] for p in points}
    if len(powers) < 2:
        raise UsageError(f"{path}: need at least 2 distinct powers, found {len(powers)}")
    if any(p["ln_ratio"] is None for p in points):
        raise ComputeError(f"{path}: nonpositive Stokes/anti-Stokes ratio")
    return points


def _slope(points):
    series = PowerSeries((p["absorbed_equivalent_power_uW"], p["ln_ratio"]) for p in points)
    return fit_ratio_slope(series)


def cmd_thermal(args, config: RunConfig) -> int:
    sample = _read_manifest(args.sample, config, args)
    bulk = _read_manifest(args.bulk, config, args)
    try:
        est = relative_kappa(_slope(sample), _slope(bulk), config.kappa_bulk)
    except RamanError as exc:
        raise ComputeError(str(exc)) from None
    write_json(
        {
            "kappa": est.to_dict(),
            "sample_points": sample,
            "bulk_points": bulk,
            "gamma_coeff": config.gamma_coeff,
            "reference_wavelength_nm": config.reference_wavelength_nm,
        },
        _output_dir(config) / f"{args.name}.json",
    )
    print(f"kappa = {est.kappa:.2f} W/(m K)  (r_sample={est.slope_sample:.6g}, r_bulk={est.slope_bulk:.6g})")
    return EXIT_OK


def _sidecar_power(path: Path):
    for cand in (path.with_suffix(".json"), Path(str(path) + ".json")):
        if cand.is_file():
            return load_meta(cand).delivered_power_uW
    return None


FEATURE_KEYS = ("position", "fwhm", "asymmetry", "amplitude")


def cmd_features(args, config: RunConfig) -> int:
    files = [Path(f) for f in args.files]
    if args.powers:
        powers = _floats(args.powers, sep=",")
        if len(powers) != len(files):
            raise UsageError(f"--powers has {len(powers)} values for {len(files)} files")
    else:
        powers = [None] * len(files)

    rows = []
    for path, power in zip(files, powers):
        row = {"file": str(path), "power_uW": power}
        try:
            if power is None and path.is_file():
                power = row["power_uW"] = _sidecar_power(path)
            s = _preprocess(_load(path), args)
            row.update(extract_features(s).to_dict())
            row["status"] = "ok"
        except (RamanError, UsageError, OSError, ValueError) as exc:
            row["status"] = "failed"
            row["error"] = str(exc)
            print(f"warning: {path}: {exc}", file=sys.stderr)
        rows.append(row)

    good = [r for r in rows if r["status"] == "ok"]
    if not good:
        raise ComputeError("no spectrum yielded features")

    extrapolation = None
    powered = [r for r in good if r["power_uW"] is not None]
    if len({r["power_uW"] for r in powered}) >= 2:
        extrapolation = {}
        zero_row = {"file": None, "power_uW": 0.0, "status": "extrapolated"}
        for key in FEATURE_KEYS:
            fit = fit_feature_vs_power(PowerSeries((r["power_uW"], r[key]) for r in powered))
            extrapolation[key] = fit._asdict()
            zero_row[key] = fit.intercept
        rows.append(zero_row)

    write_json(
        {"rows": rows, "extrapolation": extrapolation},
        _output_dir(config) / f"{args.name}.json",
    )
    for r in rows:
        if r["status"] == "failed":
            print(f"{r['file']}: FAILED")
        else:
            print(
                f"{r['file'] or 'zero-power'}: position {r['position']:.3f} "
                f"fwhm {r['fwhm']:.3f} asymmetry {r['asymmetry']:.3f}"
            )
    return EXIT_OK


def _add_globals(parser, suppress=False):
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=d, help="JSON run configuration")
    parser.add_argument("--out", default=d, help="output directory (overrides config)")
    parser.add_argument("--geometry", choices=("sphere3d", "column2d"), default=d)
    parser.add_argument("--quad-nodes", type=int, default=d, dest="quad_nodes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nanoraman", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    _add_globals(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="forward-model a confined Raman lineshape")
    _add_globals(p, suppress=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--d", type=float, help="single diameter (nm)")
    src.add_argument("--interval", help="uniform diameter interval LO:HI (nm)")
    src.add_argument("--distribution", help="JSON diameter distribution file")
    p.add_argument("--grid", default="250:320:0.1", help="Raman-shift grid LO:HI:STEP (cm^-1)")
    p.add_argument("--name", default="simulated", help="output file stem")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="recover diameters from a measured spectrum")
    _add_globals(p, suppress=True)
    p.add_argument("measured")
    p.add_argument("--mode", choices=("point", "interval", "grid"), default="point")
    p.add_argument("--d-range", default="2:30", dest="d_range", help="search range MIN:MAX (nm)")
    p.add_argument("--grid-nm", dest="grid_nm", help="diameters 'a,b,c' or LO:HI:STEP for grid mode")
    p.add_argument("--bulk", help="bulk reference spectrum for calibrating C and gamma0")
    p.add_argument("--baseline", type=float, help="edge fraction for linear baseline removal")
    p.add_argument("--crop", help="keep shifts LO:HI (cm^-1)")
    p.add_argument("--name", help="output file stem (default <measured>_fit)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("thermal", help="Stokes/anti-Stokes heating and relative conductivity")
    _add_globals(p, suppress=True)
    p.add_argument("--sample", required=True, help="manifest of the sample's Stokes pairs")
    p.add_argument("--bulk", required=True, help="manifest of the bulk reference's Stokes pairs")
    p.add_argument("--baseline", type=float, help="edge fraction for linear baseline removal")
    p.add_argument("--name", default="kappa", help="output file stem")
    p.set_defaults(func=cmd_thermal)

    p = sub.add_parser("features", help="peak features and zero-power extrapolation")
    _add_globals(p, suppress=True)
    p.add_argument("files", nargs="+")
    p.add_argument("--powers", help="comma-separated delivered powers (uW), one per file")
    p.add_argument("--baseline", type=float, help="edge fraction for linear baseline removal")
    p.add_argument("--crop", help="keep shifts LO:HI (cm^-1)")
    p.add_argument("--name", default="features", help="output file stem")
    p.set_defaults(func=cmd_features)
    return parser


def _config_from_args(args) -> RunConfig:
    config = load_config(args.config)
    if args.out is not None:
        config = config.replace(output_dir=args.out)
    changes = {}
    if args.geometry is not None:
        changes["geometry"] = args.geometry
    if args.quad_nodes is not None:
        changes["quad_nodes"] = args.quad_nodes
    if changes:
        config = config.replace(params=config.params.replace(**changes))
    return config


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        return args.func(args, config)
    except (UsageError, ValidationError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ComputeError, RamanError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
