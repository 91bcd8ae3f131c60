"""Spectrum and measurement-metadata types, text I/O and preprocessing."""

from __future__ import annotations

import json
import math
import re
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .exceptions import InsufficientDataError, ParseError, ValidationError

MIN_POINTS = 8

_SPLIT = re.compile(r"[,;\s]+")


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Intensity sampled on a strictly increasing Raman-shift axis (cm^-1).

    Both arrays are copied and marked read-only on construction.
    """

    wavenumbers: np.ndarray
    intensities: np.ndarray

    def __post_init__(self):
        x = _frozen(self.wavenumbers)
        y = _frozen(self.intensities)
        if x.ndim != 1 or y.ndim != 1:
            raise ValidationError("wavenumbers and intensities must be 1-D")
        if x.shape != y.shape:
            raise ValidationError(
                f"length mismatch: {x.size} wavenumbers vs {y.size} intensities"
            )
        if x.size < MIN_POINTS:
            raise InsufficientDataError(
                f"spectrum has {x.size} points, at least {MIN_POINTS} required"
            )
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValidationError("spectrum contains non-finite values")
        if np.any(np.diff(x) <= 0):
            raise ValidationError("wavenumbers must be strictly increasing")
        object.__setattr__(self, "wavenumbers", x)
        object.__setattr__(self, "intensities", y)

    def __len__(self):
        return self.wavenumbers.size

    def __eq__(self, other):
        if not isinstance(other, Spectrum):
            return NotImplemented
        return np.array_equal(self.wavenumbers, other.wavenumbers) and np.array_equal(
            self.intensities, other.intensities
        )

    __hash__ = None

    @classmethod
    def from_unsorted(cls, wavenumbers, intensities) -> "Spectrum":
        """Build a spectrum from rows in any order; duplicates are rejected."""
        x = np.asarray(wavenumbers, dtype=float)
        y = np.asarray(intensities, dtype=float)
        if x.shape != y.shape:
            raise ValidationError("wavenumbers and intensities differ in length")
        order = np.argsort(x, kind="stable")
        x, y = x[order], y[order]
        dup = np.flatnonzero(np.diff(x) == 0)
        if dup.size:
            raise ValidationError(f"duplicate wavenumber {x[dup[0]]!r}")
        return cls(x, y)

    def with_intensities(self, intensities) -> "Spectrum":
        return Spectrum(self.wavenumbers, intensities)


@dataclass(frozen=True)
class MeasurementMeta:
    """Acquisition conditions attached to a recorded spectrum."""

    wavelength_nm: float
    source_power_uW: float
    filter_od: float = 0.0
    catalyst_size_nm: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        if not self.wavelength_nm > 0:
            raise ValidationError("wavelength_nm must be > 0")
        if not self.source_power_uW > 0:
            raise ValidationError("source_power_uW must be > 0")
        if not self.filter_od >= 0:
            raise ValidationError("filter_od must be >= 0")
        if self.catalyst_size_nm is not None and not self.catalyst_size_nm > 0:
            raise ValidationError("catalyst_size_nm must be > 0 when given")

    @property
    def delivered_power_uW(self) -> float:
        """Power reaching the sample after the neutral-density filter."""
        return self.source_power_uW * 10.0 ** (-self.filter_od)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "MeasurementMeta":
        known = {"wavelength_nm", "source_power_uW", "filter_od", "catalyst_size_nm", "label"}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown metadata keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ValidationError(str(exc)) from None


def load_meta(path) -> MeasurementMeta:
    """Read a sidecar JSON metadata document."""
    with open(path, encoding="utf-8") as fh:
        return MeasurementMeta.from_dict(json.load(fh))


def save_meta(meta: MeasurementMeta, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_spectrum(path, format: str = "csv2col") -> Spectrum:
    """Read a two-column (wavenumber, intensity) text file.

    Columns may be separated by commas, semicolons or whitespace; lines
    starting with ``#`` and blank lines are skipped. Rows are sorted by
    wavenumber.

    Raises
    ------
    ParseError
        Malformed row; the message carries the 1-based line number.
    InsufficientDataError
        Fewer than 8 data rows.
    ValidationError
        Duplicate wavenumbers.
    """
    if format != "csv2col":
        raise ValidationError(f"unsupported spectrum format {format!r}")
    xs, ys = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = [f for f in _SPLIT.split(line) if f]
            if len(fields) != 2:
                raise ParseError(f"expected 2 columns, found {len(fields)}", lineno)
            try:
                x, y = float(fields[0]), float(fields[1])
            except ValueError:
                raise ParseError(f"non-numeric value in {line!r}", lineno) from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ParseError(f"non-finite value in {line!r}", lineno)
            xs.append(x)
            ys.append(y)
    if len(xs) < MIN_POINTS:
        raise InsufficientDataError(
            f"{path}: {len(xs)} data rows, at least {MIN_POINTS} required"
        )
    return Spectrum.from_unsorted(xs, ys)


def save_spectrum(s: Spectrum, path, header: Optional[str] = None) -> None:
    """Write ``s`` in the format read by :func:`load_spectrum`.

    Values are written with 17 significant digits so a reload is bit-identical.
    """
    lines = []
    if header:
        lines.extend("# " + h for h in header.splitlines())
    lines.append("# wavenumber_cm-1,intensity")
    lines.extend(f"{x:.17g},{y:.17g}" for x, y in zip(s.wavenumbers, s.intensities))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _edge_count(edge_fraction: float, n: int) -> int:
    # round() guards against 0.3*10 -> 3.0000000000000004 -> ceil 4
    return max(1, math.ceil(round(edge_fraction * n, 9)))


BASELINE_MAX_ITER = 200


def _edge_line(x, y, k):
    x0, y0 = np.median(x[:k]), np.median(y[:k])
    x1, y1 = np.median(x[-k:]), np.median(y[-k:])
    return y0 + (y1 - y0) / (x1 - x0) * (x - x0)


def subtract_baseline(s: Spectrum, edge_fraction: float = 0.1) -> Spectrum:
    """Remove a straight line anchored at the medians of both spectrum edges.

    The anchors are (median wavenumber, median intensity) of the first and
    last ``ceil(edge_fraction * N)`` samples. The line through the residual
    medians is re-subtracted until it vanishes, so the result has zero median
    on both edge windows and a second call is a no-op. Linear input is
    removed in one pass. Negative results are kept.
    """
    if not 0 < edge_fraction <= 0.4:
        raise ValidationError(f"edge_fraction must lie in (0, 0.4], got {edge_fraction}")
    k = _edge_count(edge_fraction, len(s))
    x = s.wavenumbers
    resid = s.intensities.copy()
    floor = 1e-13 * max(1.0, float(np.max(np.abs(resid))))
    for _ in range(BASELINE_MAX_ITER):
        line = _edge_line(x, resid, k)
        resid = resid - line
        if np.max(np.abs(line)) <= floor:
            break
    return s.with_intensities(resid)


def crop_window(s: Spectrum, lo: float, hi: float) -> Spectrum:
    """Keep samples with ``lo <= wavenumber <= hi``."""
    if not lo < hi:
        raise ValidationError(f"crop window needs lo < hi, got ({lo}, {hi})")
    mask = (s.wavenumbers >= lo) & (s.wavenumbers <= hi)
    n = int(mask.sum())
    if n < MIN_POINTS:
        raise InsufficientDataError(
            f"window [{lo}, {hi}] holds {n} samples, at least {MIN_POINTS} required"
        )
    if n == len(s):
        return s
    return Spectrum(s.wavenumbers[mask], s.intensities[mask])


def normalize_peak(s: Spectrum) -> Spectrum:
    """Scale intensities so the maximum equals 1."""
    peak = s.intensities.max()
    if not peak > 0:
        raise ValidationError("cannot peak-normalize a spectrum with nonpositive maximum")
    if peak == 1.0:
        return s
    return s.with_intensities(s.intensities / peak)


def mirror_antistokes(s: Spectrum) -> Spectrum:
    """Map an anti-Stokes band recorded at negative shifts onto positive shifts.

    Spectra already on a positive axis are returned unchanged.
    """
    if np.all(s.wavenumbers < 0):
        return Spectrum(-s.wavenumbers[::-1], s.intensities[::-1])
    if np.any(s.wavenumbers < 0):
        raise ValidationError("anti-Stokes band straddles zero shift")
    return s
