"""Input checks shared by the estimator classes."""

import numpy as np

from .exceptions import ValidationError
from .spectrum import Spectrum


def check_axis(X, name="X"):
    """Coerce a wavenumber axis given as ``(n,)`` or ``(n, 1)`` to a 1-D float array."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be 1-D or a single column, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def check_xy_spectrum(X, y) -> Spectrum:
    """Build a sorted :class:`Spectrum` from an axis ``X`` and intensities ``y``."""
    x = check_axis(X)
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape != x.shape:
        raise ValidationError(f"X has {x.size} samples but y has {y.size}")
    return Spectrum.from_unsorted(x, y)


def check_spectra_matrix(X, n_points):
    """2-D ``(n_spectra, n_points)`` intensity matrix."""
    arr = np.atleast_2d(np.asarray(X, dtype=float))
    if arr.ndim != 2 or arr.shape[1] != n_points:
        raise ValidationError(
            f"expected spectra with {n_points} points per row, got shape {arr.shape}"
        )
    return arr
