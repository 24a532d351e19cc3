"""The single-strip elbow: a cylinder folded onto its mirror image along a
sine crease.

Local frame: the cylinder of radius ``r`` has the y-axis as its axis and
``f1(u, v) = (r sin(u/r), v, r cos(u/r))``.  The miter plane is
``y = tau * x``; the crease is the pre-image of the plane section,
``v = tau r sin(u/r)``.  Below the crease the elbow is ``f1``, above it is
the mirror image ``f2 = reflect(f1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, DomainError
from .geometry import PlaneThroughOrigin, SineCurve, planar_curvature, reflect


@dataclass(frozen=True)
class ElbowSpec:
    r: float
    tau: float
    s: float

    def __post_init__(self):
        for name in ("r", "tau", "s"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0.0):
                raise ConfigurationError(f"{name} must be a positive finite number, got {val}")
        if not self.s > 2.0 * self.tau * self.r:
            raise ConfigurationError(
                f"crease exceeds strip: s={self.s} must exceed 2*tau*r={2.0 * self.tau * self.r}"
            )

    @classmethod
    def for_polygon(cls, n: int, r: float, s: float) -> "ElbowSpec":
        return cls(r=r, tau=1.0 / math.tan(math.pi / n), s=s)

    @property
    def amplitude(self) -> float:
        return self.tau * self.r

    @cached_property
    def plane(self) -> PlaneThroughOrigin:
        return PlaneThroughOrigin.from_slope(self.tau)

    @property
    def outgoing_axis(self) -> np.ndarray:
        return reflect(self.plane, np.array([0.0, 1.0, 0.0]))


@dataclass(frozen=True)
class ImageCrease:
    """The plane section of the cylinder by the miter plane (an ellipse)."""

    center: np.ndarray
    major_axis: np.ndarray
    minor_axis: np.ndarray
    semi_major: float
    semi_minor: float

    def point(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)[..., None]
        return self.center + self.semi_major * np.sin(t) * self.major_axis + self.semi_minor * np.cos(t) * self.minor_axis

    def curvature(self, t):
        """Curvature of the ellipse at angular parameter ``t``."""
        a, b = self.semi_major, self.semi_minor
        t = np.asarray(t, dtype=float)
        return a * b / (a * a * np.cos(t) ** 2 + b * b * np.sin(t) ** 2) ** 1.5


@dataclass(frozen=True)
class ElbowMap:
    spec: ElbowSpec

    @property
    def plane(self) -> PlaneThroughOrigin:
        return self.spec.plane

    @cached_property
    def crease(self) -> SineCurve:
        return crease_of(self.spec)

    @cached_property
    def image_crease(self) -> ImageCrease:
        return image_crease(self.spec)

    def __call__(self, u, v):
        return elbow(self.spec, u, v)


def f1(spec: ElbowSpec, u, v) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    t = u / spec.r
    u, v, t = np.broadcast_arrays(u, v, t)
    return np.stack([spec.r * np.sin(t), v, spec.r * np.cos(t)], axis=-1)


def f2(spec: ElbowSpec, u, v) -> np.ndarray:
    return reflect(spec.plane, f1(spec, u, v))


def crease_of(spec: ElbowSpec) -> SineCurve:
    return SineCurve(spec.amplitude, spec.r, -math.pi * spec.r, math.pi * spec.r)


def crease_height(spec: ElbowSpec, u):
    return spec.amplitude * np.sin(np.asarray(u, dtype=float) / spec.r)


def _check_strip(spec: ElbowSpec, u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    half_u = math.pi * spec.r * (1.0 + 1e-12)
    half_v = 0.5 * spec.s * (1.0 + 1e-12)
    if np.any(np.abs(u) > half_u) or np.any(np.abs(v) > half_v):
        raise DomainError("point lies outside the strip [-pi r, pi r] x [-s/2, s/2]")
    return u, v


def elbow(spec: ElbowSpec, u, v) -> np.ndarray:
    """Piecewise map: ``f1`` on and below the crease, ``f2`` above it."""
    u, v = _check_strip(spec, u, v)
    lower = f1(spec, u, v)
    upper = reflect(spec.plane, lower)
    above = np.broadcast_to(v > crease_height(spec, u), lower.shape[:-1])
    return np.where(above[..., None], upper, lower)


def jacobian_f1(spec: ElbowSpec, u) -> np.ndarray:
    """Columns ``(df1/du, df1/dv)`` as an array of shape ``(..., 3, 2)``."""
    t = np.asarray(u, dtype=float) / spec.r
    du = np.stack([np.cos(t), np.zeros_like(t), -np.sin(t)], axis=-1)
    dv = np.broadcast_to(np.array([0.0, 1.0, 0.0]), du.shape)
    return np.stack([du, dv], axis=-1)


def jacobian_f2(spec: ElbowSpec, u) -> np.ndarray:
    j = jacobian_f1(spec, u)
    cols = np.moveaxis(j, -1, -2)
    return np.moveaxis(reflect(spec.plane, cols), -2, -1)


def outward_normal_f1(spec: ElbowSpec, u) -> np.ndarray:
    t = np.asarray(u, dtype=float) / spec.r
    return np.stack([np.sin(t), np.zeros_like(t), np.cos(t)], axis=-1)


def image_crease(spec: ElbowSpec) -> ImageCrease:
    k = math.sqrt(1.0 + spec.tau**2)
    return ImageCrease(
        center=np.zeros(3),
        major_axis=np.array([1.0, spec.tau, 0.0]) / k,
        minor_axis=np.array([0.0, 0.0, 1.0]),
        semi_major=spec.r * k,
        semi_minor=spec.r,
    )


def curvature_condition(spec: ElbowSpec, u):
    """Curvatures ``(kappa_image, kappa_domain)`` at crease parameter ``u``.

    ``kappa_image`` is the ellipse curvature at ``f1(crease(u))``; the
    ellipse's angular parameter equals ``u / r``.
    """
    curve = crease_of(spec)
    kappa_domain = planar_curvature(curve, u)
    kappa_image = image_crease(spec).curvature(np.asarray(u, dtype=float) / spec.r)
    if np.ndim(kappa_image) == 0:
        kappa_image = float(kappa_image)
    return kappa_image, kappa_domain


def fold_dihedral(spec: ElbowSpec, u):
    """Fold angle along the crease: 0 for an unfolded sheet, pi when the two
    sides are pressed flat onto one another.

    Computed as pi minus the angle between the outward normals of the two
    one-sided cylinders at the crease point.
    """
    t = np.asarray(u, dtype=float) / (spec.r)
    if np.any(np.abs(t) > math.pi * (1.0 + 1e-12)):
        raise DomainError("crease parameter outside [-pi r, pi r]")
    n1 = outward_normal_f1(spec, u)
    n2 = reflect(spec.plane, n1)
    cosang = np.clip(np.sum(n1 * n2, axis=-1), -1.0, 1.0)
    out = math.pi - np.arccos(cosang)
    return float(out) if np.ndim(out) == 0 else out
