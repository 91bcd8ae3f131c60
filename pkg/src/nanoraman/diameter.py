"""Least-squares inversion of Raman spectra to nanowire diameters.

Every candidate model curve is matched to the data with a closed-form
amplitude and additive offset, so the nonlinear search only runs over one
(point) or two (interval) diameters. Grid fits solve for nonnegative
mixture weights instead.
"""

from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from ._optim import golden_section, nnls_projected_gradient
from .distribution import DiameterDistribution
from .exceptions import FitQualityWarning, NoFitError, ValidationError
from .rcf import DEFAULT_PARAMS, RcfParams, model_curve
from .spectrum import Spectrum

COARSE_POINTS = 16
INTERVAL_COARSE_POINTS = 12
CACHE_DECIMALS = 4
TIE_RTOL = 1e-12


class CurveCache:
    """Peak-normalized model curves on a fixed grid, keyed by rounded diameter.

    Curves are evaluated at the rounded diameter, so cached and fresh
    lookups agree exactly. Insertion is guarded by a lock.
    """

    def __init__(self, omega_grid, params: RcfParams):
        self.omega_grid = np.asarray(omega_grid, dtype=float)
        self.params = params
        self._curves = {}
        self._lock = threading.Lock()

    @staticmethod
    def key(d: float) -> float:
        return round(float(d), CACHE_DECIMALS)

    def __call__(self, d: float) -> np.ndarray:
        k = self.key(d)
        curve = self._curves.get(k)
        if curve is None:
            curve = model_curve(self.omega_grid, k, self.params)
            curve.setflags(write=False)
            with self._lock:
                curve = self._curves.setdefault(k, curve)
        return curve

    def mixture(self, distribution: DiameterDistribution) -> np.ndarray:
        diameters, weights = distribution.support()
        y = np.zeros_like(self.omega_grid)
        for d, w in zip(diameters, weights):
            if w > 0:
                y += w * self(d)
        return y / y.max()

    def __len__(self):
        return len(self._curves)


def solve_scale_offset(y, m) -> Tuple[float, float, float]:
    """Best ``scale >= 0`` and ``offset`` for ``y ~ scale * m + offset``.

    Returns ``(scale, offset, sse)``.
    """
    ym, mm = y.mean(), m.mean()
    dm = m - mm
    den = float(dm @ dm)
    scale = float(dm @ (y - ym)) / den if den > 0 else 0.0
    if scale < 0:
        scale = 0.0
    offset = float(ym - scale * mm)
    r = y - scale * m - offset
    return scale, offset, float(r @ r)


@dataclass
class FitReport:
    distribution: DiameterDistribution
    scale: float
    offset: float
    sse: float
    n_model_evals: int
    geometry: str = "sphere3d"
    coarse_scan: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "distribution": self.distribution.to_dict(),
            "summary": self.distribution.summary(),
            "scale": self.scale,
            "offset": self.offset,
            "sse": self.sse,
            "n_model_evals": self.n_model_evals,
            "geometry": self.geometry,
            "coarse_scan": self.coarse_scan,
            "diagnostics": self.diagnostics,
        }


def _check_range(d_range):
    try:
        d_min, d_max = map(float, d_range)
    except (TypeError, ValueError):
        raise ValidationError("d_range must be a (d_min, d_max) pair") from None
    if not 0 < d_min < d_max:
        raise ValidationError(f"d_range needs 0 < d_min < d_max, got ({d_min}, {d_max})")
    return d_min, d_max


def _tie_tol(y) -> float:
    return TIE_RTOL * float(y @ y)


class _Objective:
    def __init__(self, y, model):
        self.y = y
        self.model = model
        self.nfev = 0

    def fit(self, arg):
        self.nfev += 1
        return solve_scale_offset(self.y, self.model(arg))

    def __call__(self, arg) -> float:
        return self.fit(arg)[2]


def _pick(candidates, tol):
    """Lowest SSE; among values within ``tol`` of it, the smallest diameter key."""
    best = min(c[0] for c in candidates)
    return min((c for c in candidates if c[0] <= best + tol), key=lambda c: c[1])


def fit_single_diameter(
    measured: Spectrum,
    params: RcfParams = DEFAULT_PARAMS,
    d_range=(2.0, 30.0),
    cache: Optional[CurveCache] = None,
) -> FitReport:
    """Best single diameter by coarse scan plus golden-section refinement.

    A 16-point scan over ``d_range`` brackets the minimum and golden-section
    search refines inside the bracket. Warns with :class:`FitQualityWarning`
    when the optimum sits on a boundary of ``d_range``.
    """
    d_min, d_max = _check_range(d_range)
    y = measured.intensities
    cache = cache or CurveCache(measured.wavenumbers, params)
    obj = _Objective(y, cache)
    tol = _tie_tol(y)

    coarse = np.linspace(d_min, d_max, COARSE_POINTS)
    scan = [(obj(d), CurveCache.key(d)) for d in coarse]
    j = min(range(len(scan)), key=lambda i: (scan[i][0], i))
    lo = coarse[max(j - 1, 0)]
    hi = coarse[min(j + 1, COARSE_POINTS - 1)]
    g = golden_section(obj, lo, hi, xtol=10.0 ** -(CACHE_DECIMALS + 1))
    sse, d_best = _pick(scan + [(g.fun, CurveCache.key(g.x))], tol)

    scale, offset, sse = solve_scale_offset(y, cache(d_best))
    if d_best <= CurveCache.key(d_min) or d_best >= CurveCache.key(d_max):
        warnings.warn(
            f"best diameter {d_best:g} nm is pinned to the search boundary "
            f"[{d_min:g}, {d_max:g}]",
            FitQualityWarning,
            stacklevel=2,
        )
    return FitReport(
        distribution=DiameterDistribution.point(d_best),
        scale=scale,
        offset=offset,
        sse=sse,
        n_model_evals=obj.nfev,
        geometry=params.geometry,
        coarse_scan=[{"d_nm": float(d), "sse": s} for d, (s, _) in zip(coarse, scan)],
    )


def _interval_dist(lo, hi):
    if hi - lo < 10.0 ** -CACHE_DECIMALS:
        return DiameterDistribution.point(lo)
    return DiameterDistribution.interval(lo, hi)


def fit_interval_distribution(
    measured: Spectrum,
    params: RcfParams = DEFAULT_PARAMS,
    d_range=(2.0, 30.0),
    cache: Optional[CurveCache] = None,
) -> FitReport:
    """Best uniform diameter interval ``[D_min, D_max]``.

    The model is the 21-node average of single-diameter curves across the
    interval. A coarse grid of admissible pairs (``D_min <= D_max``, the
    diagonal being point models) seeds a Nelder-Mead refinement. A
    refinement that shrinks to zero width falls back to
    :func:`fit_single_diameter` with a :class:`FitQualityWarning`.
    """
    d_min, d_max = _check_range(d_range)
    y = measured.intensities
    cache = cache or CurveCache(measured.wavenumbers, params)
    tol = _tie_tol(y)

    def model(pair):
        lo, hi = sorted(pair)
        return cache.mixture(_interval_dist(lo, hi))

    obj = _Objective(y, model)

    def penalized(v):
        lo, hi = sorted(float(t) for t in v)
        if lo < d_min or hi > d_max:
            return np.inf
        return obj((lo, hi))

    coarse = np.linspace(d_min, d_max, INTERVAL_COARSE_POINTS)
    scan = []
    for i, lo in enumerate(coarse):
        for hi in coarse[i:]:
            scan.append((obj((lo, hi)), (float(lo), float(hi))))
    best_sse = min(s for s, _ in scan)
    # flat landscape: prefer the narrowest, then smallest, pair
    s0, (lo0, hi0) = min(
        (c for c in scan if c[0] <= best_sse + tol),
        key=lambda c: (c[1][1] - c[1][0], c[1][0]),
    )

    step = 0.5 * (coarse[1] - coarse[0])
    simplex = np.array([[lo0, hi0], [lo0 + step, hi0], [lo0, hi0 + step]])
    if hi0 + step > d_max:
        simplex[2] = [lo0 - step, hi0]
    res = minimize(
        penalized,
        x0=simplex[0],
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": 10.0 ** -CACHE_DECIMALS,
            "fatol": tol,
            "maxiter": 400,
        },
    )
    lo, hi = sorted(float(t) for t in res.x)
    lo, hi = CurveCache.key(lo), CurveCache.key(hi)
    refined = penalized((lo, hi))
    if not refined <= s0:
        refined, (lo, hi) = s0, (lo0, hi0)

    coarse_scan = [{"interval_nm": list(p), "sse": s} for s, p in scan]
    if hi - lo < 10.0 ** -CACHE_DECIMALS:
        warnings.warn(
            "interval refinement collapsed to zero width; reporting a point fit",
            FitQualityWarning,
            stacklevel=2,
        )
        report = fit_single_diameter(measured, params, (d_min, d_max), cache)
        report.n_model_evals += obj.nfev
        report.coarse_scan = coarse_scan
        report.diagnostics["collapsed_interval"] = True
        return report

    dist = DiameterDistribution.interval(lo, hi)
    scale, offset, sse = solve_scale_offset(y, cache.mixture(dist))
    if lo <= CurveCache.key(d_min) or hi >= CurveCache.key(d_max):
        warnings.warn(
            f"interval {lo:g}~{hi:g} nm touches the search boundary",
            FitQualityWarning,
            stacklevel=2,
        )
    return FitReport(
        distribution=dist,
        scale=scale,
        offset=offset,
        sse=sse,
        n_model_evals=obj.nfev,
        geometry=params.geometry,
        coarse_scan=coarse_scan,
    )


def fit_grid_distribution(
    measured: Spectrum,
    params: RcfParams = DEFAULT_PARAMS,
    grid_nm: Sequence[float] = (),
    cache: Optional[CurveCache] = None,
    tol: float = 1e-10,
) -> FitReport:
    """Nonnegative mixture weights over a fixed diameter grid.

    The offset is removed by centering the data and every model column, so
    the nonnegative solve only sees the mixture coefficients. Their sum is
    reported as ``scale`` and the normalized coefficients as the weights.
    """
    grid = np.asarray(grid_nm, dtype=float)
    if grid.ndim != 1 or not 5 <= grid.size <= 50:
        raise ValidationError(f"grid must hold 5 to 50 diameters, got {grid.size}")
    if np.any(grid <= 0):
        raise ValidationError("grid diameters must be > 0")
    if np.unique(grid).size != grid.size:
        raise ValidationError("grid diameters must be distinct")
    y = measured.intensities
    cache = cache or CurveCache(measured.wavenumbers, params)
    M = np.column_stack([cache(d) for d in grid])
    col_mean = M.mean(axis=0)
    y_mean = y.mean()
    res = nnls_projected_gradient(M - col_mean, y - y_mean, tol=tol)
    x = res.x
    total = float(x.sum())
    if not total > 0:
        raise NoFitError("nonnegative least squares returned the all-zero solution")
    offset = float(y_mean - col_mean @ x)
    r = y - M @ x - offset
    return FitReport(
        distribution=DiameterDistribution.grid(grid, x / total),
        scale=total,
        offset=offset,
        sse=float(r @ r),
        n_model_evals=grid.size,
        geometry=params.geometry,
        diagnostics={
            "kkt_residual": res.kkt_residual,
            "nnls_iterations": res.n_iter,
            "objective_history": res.objective_history.tolist(),
        },
    )
