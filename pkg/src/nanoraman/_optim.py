"""Small deterministic optimizers: golden-section search and NNLS."""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
# objective slack for comparisons near a flat optimum
_ROUNDOFF = 4 * np.finfo(float).eps


class GoldenResult(NamedTuple):
    x: float
    fun: float
    nfev: int


def golden_section(f: Callable[[float], float], lo: float, hi: float, xtol=1e-6, maxiter=200):
    """Minimize a unimodal ``f`` on ``[lo, hi]``.

    Returns the best point evaluated, so the result never exceeds the value
    at either interior probe.
    """
    if not lo < hi:
        raise ValueError("golden_section needs lo < hi")
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    nfev = 2
    best = min((f1, x1), (f2, x2))
    for _ in range(maxiter):
        if b - a <= xtol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
            cand = (f1, x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
            cand = (f2, x2)
        nfev += 1
        best = min(best, cand)
    return GoldenResult(best[1], best[0], nfev)


class NnlsResult(NamedTuple):
    x: np.ndarray
    objective_history: np.ndarray
    kkt_residual: float
    n_iter: int


def kkt_residual(A, b, x) -> float:
    """Scaled KKT violation ``max|min(x, grad)| / max|A^T b|`` of ``min |Ax - b|^2, x >= 0``."""
    g = A.T @ (A @ x - b)
    scale = np.max(np.abs(A.T @ b))
    if scale == 0:
        scale = 1.0
    return float(np.max(np.abs(np.minimum(x, g))) / scale)


def _face_minimize(A, b, x, obj):
    """Descend from feasible ``x`` to the minimizer over its free face.

    Whenever the unconstrained face solution leaves the orthant, move to the
    boundary, drop the variables that hit zero, and re-solve.
    """
    n = x.size
    while True:
        free = x > 0
        if not free.any():
            return x
        z = np.zeros(n)
        z[free], *_ = np.linalg.lstsq(A[:, free], b, rcond=None)
        if np.all(z[free] > 0):
            fz, fx = obj(z), obj(x)
            return z if fz <= fx + _ROUNDOFF * max(fx, 1.0) else x
        blocking = np.flatnonzero(free & (z <= 0))
        ratios = x[blocking] / (x[blocking] - z[blocking])
        k = int(np.argmin(ratios))
        x = np.maximum(x + ratios[k] * (z - x), 0.0)
        # the limiting variable lands exactly on the bound
        x[blocking[k]] = 0.0


def nnls_projected_gradient(A, b, tol=1e-10, max_iter=500) -> NnlsResult:
    """Nonnegative least squares by projected gradient with face minimization.

    Each iteration takes a projected-gradient step with step size ``1/L``
    (``L`` the largest eigenvalue of ``A^T A``), which releases bound
    variables whose gradient points into the orthant, then minimizes exactly
    over the resulting free face. Both moves are non-increasing in the
    objective. Iteration stops once the scaled KKT residual drops below
    ``tol``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[1]
    AtA = A.T @ A
    Atb = A.T @ b
    L = float(np.linalg.eigvalsh(AtA)[-1])
    if L <= 0:
        return NnlsResult(np.zeros(n), np.array([0.5 * b @ b]), 0.0, 0)

    def obj(v):
        r = A @ v - b
        return 0.5 * float(r @ r)

    x = np.zeros(n)
    history = [obj(x)]
    it = 0
    kkt = kkt_residual(A, b, x)
    while kkt >= tol and it < max_iter:
        it += 1
        g = AtA @ x - Atb
        x_new = _face_minimize(A, b, np.maximum(0.0, x - g / L), obj)
        f_new = obj(x_new)
        if f_new > history[-1] + _ROUNDOFF * max(history[-1], 1.0):
            # genuine increase, not round-off; keep the objective monotone
            break
        x = x_new
        history.append(f_new)
        kkt = kkt_residual(A, b, x)
    return NnlsResult(x, np.array(history), kkt, it)
