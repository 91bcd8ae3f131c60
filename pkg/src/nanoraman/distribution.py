"""Nanowire diameter distributions consumed by the forward model and fits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .exceptions import ValidationError

KINDS = ("point", "uniform_interval", "grid")

INTERVAL_NODES = 21


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiameterDistribution:
    """Diameter support with weights.

    Build instances through :meth:`point`, :meth:`interval` or :meth:`grid`.
    """

    kind: str
    point_nm: Optional[float] = None
    interval_nm: Optional[Tuple[float, float]] = None
    grid_nm: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "point":
            if self.point_nm is None or not self.point_nm > 0:
                raise ValidationError("point diameter must be > 0")
            object.__setattr__(self, "point_nm", float(self.point_nm))
        elif self.kind == "uniform_interval":
            if self.interval_nm is None or len(self.interval_nm) != 2:
                raise ValidationError("uniform_interval needs (D_min, D_max)")
            lo, hi = map(float, self.interval_nm)
            if not 0 < lo < hi:
                raise ValidationError(f"interval needs 0 < D_min < D_max, got ({lo}, {hi})")
            object.__setattr__(self, "interval_nm", (lo, hi))
        else:
            if self.grid_nm is None or self.weights is None:
                raise ValidationError("grid distribution needs grid_nm and weights")
            g, w = _readonly(self.grid_nm), _readonly(self.weights)
            if g.ndim != 1 or g.shape != w.shape or g.size == 0:
                raise ValidationError("grid_nm and weights must be equal-length 1-D arrays")
            if np.any(g <= 0):
                raise ValidationError("grid diameters must be > 0")
            if np.any(w < 0):
                raise ValidationError("weights must be >= 0")
            if abs(w.sum() - 1.0) > 1e-12:
                raise ValidationError(f"weights sum to {w.sum()!r}, expected 1")
            object.__setattr__(self, "grid_nm", g)
            object.__setattr__(self, "weights", w)

    @classmethod
    def point(cls, d_nm):
        return cls("point", point_nm=d_nm)

    @classmethod
    def interval(cls, d_min, d_max):
        return cls("uniform_interval", interval_nm=(d_min, d_max))

    @classmethod
    def grid(cls, grid_nm, weights):
        w = np.asarray(weights, dtype=float)
        return cls("grid", grid_nm=grid_nm, weights=w / w.sum())

    def support(self):
        """Return ``(diameters, weights)`` used to average model curves.

        A uniform interval is discretized on 21 equally spaced diameters
        with trapezoidal weights.
        """
        if self.kind == "point":
            return np.array([self.point_nm]), np.array([1.0])
        if self.kind == "uniform_interval":
            lo, hi = self.interval_nm
            d = np.linspace(lo, hi, INTERVAL_NODES)
            w = np.full(INTERVAL_NODES, 1.0)
            w[0] = w[-1] = 0.5
            return d, w / w.sum()
        return np.array(self.grid_nm), np.array(self.weights)

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "point":
            out["point_nm"] = self.point_nm
        elif self.kind == "uniform_interval":
            out["interval_nm"] = list(self.interval_nm)
        else:
            out["grid_nm"] = self.grid_nm.tolist()
            out["weights"] = self.weights.tolist()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "DiameterDistribution":
        kind = data.get("kind")
        if kind == "point":
            return cls.point(data["point_nm"])
        if kind == "uniform_interval":
            return cls.interval(*data["interval_nm"])
        if kind == "grid":
            return cls("grid", grid_nm=data["grid_nm"], weights=data["weights"])
        raise ValidationError(f"unknown distribution kind {kind!r}")

    def summary(self) -> str:
        """Human-readable range in ``Dmin~Dmax nm`` notation."""
        if self.kind == "point":
            return f"{self.point_nm:.1f} nm"
        if self.kind == "uniform_interval":
            lo, hi = self.interval_nm
            return f"{lo:.1f}~{hi:.1f} nm"
        active = self.grid_nm[self.weights > 0]
        return f"{active.min():.1f}~{active.max():.1f} nm"
