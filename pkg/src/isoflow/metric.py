"""Closed-form geometry of the conformally flat model spaces.

The ambient manifold is R^3 carrying the metric g = w^4 * delta with
conformal factor w = 1 + m/(2r) in isotropic coordinates.  For m = 0 this
is Euclidean space.  For m > 0 the centered sphere r = m/2 is minimal (the
horizon) and is treated as the inner boundary of the manifold: radii below
m/2 are rejected rather than continued inward.

Conformal densities relative to the flat metric: w^2 for lengths, w^4 for
areas, w^6 for volumes.  Centered coordinate spheres have closed-form area,
enclosed volume, mean curvature and Hawking mass, collected here.  Enclosed
volume is measured from the horizon outward; the region behind the horizon
contributes nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AmbientMetric",
    "SphereGeometry",
    "sphere_area",
    "sphere_area_derivative",
    "enclosed_volume",
    "sphere_mean_curvature",
    "sphere_hawking_mass",
    "sphere_geometry",
    "asymptotic_flatness_checks",
]

_BINOM6 = (1, 6, 15, 20, 15, 6, 1)


@dataclass(frozen=True)
class AmbientMetric:
    """Conformally flat model metric of mass ``m >= 0``."""

    mass: float = 0.0

    def __post_init__(self):
        if not (self.mass >= 0.0) or not math.isfinite(self.mass):
            raise ValueError(f"metric mass must be finite and >= 0, got {self.mass}")

    @property
    def horizon_radius(self) -> float:
        return 0.5 * self.mass

    @property
    def kind(self) -> str:
        return "euclidean" if self.mass == 0.0 else "schwarzschild"

    def conformal_factor(self, r):
        """w = 1 + m/(2r); the flat-to-g length density is w^2."""
        if self.mass == 0.0:
            return np.ones_like(np.asarray(r, dtype=float))
        return 1.0 + self.mass / (2.0 * np.asarray(r, dtype=float))

    @classmethod
    def euclidean(cls) -> "AmbientMetric":
        return cls(0.0)

    @classmethod
    def schwarzschild(cls, mass: float) -> "AmbientMetric":
        return cls(mass)


def _check_radius(metric: AmbientMetric, r):
    r = np.asarray(r, dtype=float)
    rmin = metric.horizon_radius
    # allow r == m/2 up to roundoff, reject anything genuinely inside
    if np.any(r < rmin * (1.0 - 4e-16) - 0.0):
        raise ValueError(f"radius inside the horizon: r < {rmin}")
    if np.any(~np.isfinite(r)) or np.any(r < 0.0):
        raise ValueError("radius must be finite and non-negative")
    return r


def sphere_area(metric: AmbientMetric, r):
    """g-area of the centered coordinate sphere of isotropic radius r.

    A(r) = 4 pi r^2 (1 + m/2r)^4; equals 16 pi m^2 at the horizon.
    """
    r = _check_radius(metric, r)
    w = 1.0 + metric.mass / (2.0 * r) if metric.mass else 1.0
    return 4.0 * math.pi * r * r * w**4


def sphere_area_derivative(metric: AmbientMetric, r):
    """dA/dr = 8 pi r (1 + m/2r)^3 (1 - m/2r); vanishes at the horizon."""
    r = _check_radius(metric, r)
    m = metric.mass
    if m == 0.0:
        return 8.0 * math.pi * r
    a = m / (2.0 * r)
    return 8.0 * math.pi * r * (1.0 + a) ** 3 * (1.0 - a)


def enclosed_volume(metric: AmbientMetric, r):
    """g-volume between the horizon and the coordinate sphere of radius r.

    Closed form of int_{m/2}^r 4 pi rho^2 (1 + m/2rho)^6 drho: a polynomial
    in r plus the logarithmic term 10 pi m^3 log(2r/m) coming from the 1/rho
    monomial of the expanded conformal density.
    """
    r = _check_radius(metric, r)
    m = metric.mass
    if m == 0.0:
        return (4.0 / 3.0) * math.pi * r**3
    a = 0.5 * m
    total = np.zeros_like(r)
    for k, c in enumerate(_BINOM6):
        coeff = c * a**k
        if k == 3:
            total = total + coeff * np.log(r / a)
        else:
            p = 3 - k
            total = total + coeff * (r**p - a**p) / p
    return 4.0 * math.pi * total


def sphere_mean_curvature(metric: AmbientMetric, r):
    """Mean curvature (outward normal) of the coordinate sphere of radius r.

    H(r) = 2 (1 - m/2r) / (r (1 + m/2r)^3): positive outside the horizon,
    zero on it, and 2/r in the Euclidean case.  Consistent with the first
    variation of area, dA/dr = H * w^2 * A.
    """
    r = _check_radius(metric, r)
    m = metric.mass
    if m == 0.0:
        return 2.0 / r
    a = m / (2.0 * r)
    return 2.0 * (1.0 - a) / (r * (1.0 + a) ** 3)


def sphere_hawking_mass(metric: AmbientMetric, r):
    """Hawking mass sqrt(A/16pi) (1 - A H^2 / 16pi) of a coordinate sphere.

    Identically equal to the metric mass m, for every r >= m/2.
    """
    area = sphere_area(metric, r)
    h = sphere_mean_curvature(metric, r)
    return np.sqrt(area / (16.0 * math.pi)) * (1.0 - area * h * h / (16.0 * math.pi))


@dataclass(frozen=True)
class SphereGeometry:
    """All closed-form quantities of one centered coordinate sphere."""

    r: float
    area: float
    enclosed_volume: float
    mean_curvature: float
    hawking_mass: float


def sphere_geometry(metric: AmbientMetric, r: float) -> SphereGeometry:
    return SphereGeometry(
        r=float(r),
        area=float(sphere_area(metric, r)),
        enclosed_volume=float(enclosed_volume(metric, r)),
        mean_curvature=float(sphere_mean_curvature(metric, r)),
        hawking_mass=float(sphere_hawking_mass(metric, r)),
    )


def asymptotic_flatness_checks(metric: AmbientMetric, radii) -> np.ndarray:
    """Large-sphere diagnostics as a table with one row per radius.

    Columns: r, |S_r| / (4 pi r^2), |S_r|^(3/2) / |B_r|.  The first ratio
    tends to 1 and the second to 6 sqrt(pi) as r grows, which is the
    asymptotic-flatness signature the rest of the package leans on.
    """
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    areas = sphere_area(metric, radii)
    vols = enclosed_volume(metric, radii)
    area_ratio = areas / (4.0 * math.pi * radii**2)
    iso_ratio = areas**1.5 / vols
    return np.column_stack([radii, area_ratio, iso_ratio])
