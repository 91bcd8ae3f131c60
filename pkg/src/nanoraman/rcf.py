"""RCF phonon-confinement lineshape for Ge nanowires.

Phonon momentum is expressed as the zone fraction ``xi = q / (2 pi / a)``, so
the zone boundary is ``xi = 1``. In these units the optical-branch dispersion
is ``sqrt(A + B cos(pi xi)) + C`` and the Gaussian confinement weight
``exp(-q^2 D^2 / 16 pi^2)`` becomes ``exp(-xi^2 D^2 / (4 a^2))``.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, replace
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy.special import roots_legendre

from .distribution import DiameterDistribution
from .exceptions import DomainError, GridRangeWarning, ValidationError
from .features import extract_features, fit_lorentzian
from .spectrum import Spectrum

GEOMETRIES = ("sphere3d", "column2d")

# rows of the (omega x node) integrand evaluated at once
_CHUNK = 256


@dataclass(frozen=True)
class RcfParams:
    """Dispersion, linewidth and quadrature settings of the forward model.

    Defaults are bulk-Ge values: ``A``/``B`` in cm^-2, ``C`` and ``gamma0``
    in cm^-1, ``lattice_a`` in nm.
    """

    A: float = 0.69e5
    B: float = 0.195e5
    C: float = 0.0
    gamma0: float = 3.0
    lattice_a: float = 0.5658
    geometry: str = "sphere3d"
    quad_nodes: int = 2048

    def __post_init__(self):
        if not self.A > self.B > 0:
            raise ValidationError(f"need A > B > 0, got A={self.A}, B={self.B}")
        if not self.gamma0 > 0:
            raise ValidationError("gamma0 must be > 0")
        if not self.lattice_a > 0:
            raise ValidationError("lattice_a must be > 0")
        if self.geometry not in GEOMETRIES:
            raise ValidationError(f"geometry must be one of {GEOMETRIES}, got {self.geometry!r}")
        if int(self.quad_nodes) != self.quad_nodes or self.quad_nodes < 64:
            raise ValidationError("quad_nodes must be an integer >= 64")
        object.__setattr__(self, "quad_nodes", int(self.quad_nodes))

    @property
    def bulk_peak(self) -> float:
        """Zone-centre frequency sqrt(A + B) + C."""
        return float(np.sqrt(self.A + self.B) + self.C)

    def replace(self, **changes) -> "RcfParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RcfParams":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValidationError(f"unknown RcfParams fields: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RcfParams":
        return cls.from_dict(json.loads(text))


DEFAULT_PARAMS = RcfParams()


@lru_cache(maxsize=16)
def gauss_legendre_unit(n: int):
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = roots_legendre(n)
    xi, wt = 0.5 * (x + 1.0), 0.5 * w
    xi.setflags(write=False)
    wt.setflags(write=False)
    return xi, wt


def _check_xi(xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(~np.isfinite(xi)) or np.any(xi < 0) or np.any(xi > 1):
        raise DomainError("zone fraction xi must lie in [0, 1]")
    return xi


def _scalar_or_array(v):
    return float(v) if np.ndim(v) == 0 else v


def dispersion_omega(xi, params: RcfParams = DEFAULT_PARAMS):
    """Optical-phonon frequency (cm^-1) at zone fraction ``xi``."""
    xi = _check_xi(xi)
    return _scalar_or_array(np.sqrt(params.A + params.B * np.cos(np.pi * xi)) + params.C)


def confinement_weight(xi, diameter_nm, params: RcfParams = DEFAULT_PARAMS):
    """Squared Fourier coefficient of the Gaussian confinement function."""
    xi = _check_xi(xi)
    if not diameter_nm > 0:
        raise DomainError(f"diameter must be > 0, got {diameter_nm}")
    ratio = diameter_nm / params.lattice_a
    return _scalar_or_array(np.exp(-0.25 * (xi * ratio) ** 2))


def geometric_measure(xi, geometry: str):
    if geometry == "sphere3d":
        return 4.0 * np.pi * xi**2
    return 2.0 * np.pi * xi


def rcf_intensity(omega, diameter_nm, params: RcfParams = DEFAULT_PARAMS):
    """Confinement-weighted Lorentzian response integrated over the zone.

    Evaluates the zone integral on ``params.quad_nodes`` fixed Gauss-Legendre
    nodes. ``omega`` may be a scalar or an array; the result has its shape.
    """
    if not diameter_nm > 0:
        raise DomainError(f"diameter must be > 0, got {diameter_nm}")
    xi, wt = gauss_legendre_unit(params.quad_nodes)
    om_q = np.sqrt(params.A + params.B * np.cos(np.pi * xi)) + params.C
    weight = wt * geometric_measure(xi, params.geometry) * np.exp(
        -0.25 * (xi * diameter_nm / params.lattice_a) ** 2
    )
    # nodes whose confinement weight underflowed contribute exactly zero
    keep = weight > 0
    om_q, weight = om_q[keep], weight[keep]
    hw2 = (0.5 * params.gamma0) ** 2
    om = np.asarray(omega, dtype=float)
    flat = om.reshape(-1)
    out = np.empty_like(flat)
    for start in range(0, flat.size, _CHUNK):
        block = flat[start : start + _CHUNK, None]
        out[start : start + _CHUNK] = (weight / ((block - om_q) ** 2 + hw2)).sum(axis=1)
    return _scalar_or_array(out.reshape(om.shape))


@dataclass(frozen=True, eq=False)
class ModelSpectrumRequest:
    omega_grid: np.ndarray
    diameter: Union[float, DiameterDistribution]
    params: RcfParams = DEFAULT_PARAMS

    def __post_init__(self):
        grid = np.array(self.omega_grid, dtype=float)
        if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
            raise ValidationError("omega_grid must be strictly increasing")
        grid.setflags(write=False)
        object.__setattr__(self, "omega_grid", grid)
        d = self.diameter
        if not isinstance(d, DiameterDistribution):
            if not float(d) > 0:
                raise DomainError(f"diameter must be > 0, got {d}")
            object.__setattr__(self, "diameter", float(d))
        p = self.params
        lo = dispersion_omega(1.0, p) - 10 * p.gamma0
        hi = dispersion_omega(0.0, p) + 10 * p.gamma0
        if grid[0] < lo or grid[-1] > hi:
            warnings.warn(
                f"omega grid [{grid[0]:g}, {grid[-1]:g}] extends beyond [{lo:.2f}, {hi:.2f}]",
                GridRangeWarning,
                stacklevel=3,
            )

    @property
    def distribution(self) -> DiameterDistribution:
        if isinstance(self.diameter, DiameterDistribution):
            return self.diameter
        return DiameterDistribution.point(self.diameter)


def model_curve(omega_grid, diameter_nm, params: RcfParams = DEFAULT_PARAMS) -> np.ndarray:
    """Peak-normalized single-diameter lineshape on ``omega_grid``."""
    y = rcf_intensity(np.asarray(omega_grid, dtype=float), diameter_nm, params)
    return y / y.max()


def simulate_spectrum(
    request: Union[ModelSpectrumRequest, np.ndarray],
    diameter: Optional[Union[float, DiameterDistribution]] = None,
    params: Optional[RcfParams] = None,
) -> Spectrum:
    """Peak-normalized model spectrum for one diameter or a distribution.

    Accepts either a :class:`ModelSpectrumRequest` or the three fields
    ``(omega_grid, diameter, params)``. For a distribution, the
    peak-normalized single-diameter curves are averaged with the
    distribution weights and the mean is peak-normalized again.
    """
    if not isinstance(request, ModelSpectrumRequest):
        if diameter is None:
            raise ValidationError("diameter (or distribution) is required")
        request = ModelSpectrumRequest(request, diameter, params or DEFAULT_PARAMS)
    grid = request.omega_grid
    diameters, weights = request.distribution.support()
    y = np.zeros_like(grid)
    for d, w in zip(diameters, weights):
        if w > 0:
            y += w * model_curve(grid, d, request.params)
    return Spectrum(grid, y / y.max())


def calibrate_C(bulk_reference: Spectrum, params_without_C: RcfParams = DEFAULT_PARAMS) -> RcfParams:
    """Anchor the model to a measured bulk-Ge reference.

    ``C`` is chosen so the unconfined peak sqrt(A + B) + C sits at the
    measured bulk peak position, and ``gamma0`` is replaced by the FWHM of
    a Lorentzian fitted to the reference.
    """
    position = extract_features(bulk_reference).position
    _, _, fwhm, _ = fit_lorentzian(bulk_reference)
    c = position - float(np.sqrt(params_without_C.A + params_without_C.B))
    return params_without_C.replace(C=c, gamma0=fwhm)
