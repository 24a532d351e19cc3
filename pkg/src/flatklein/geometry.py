"""Exact-formula 3D primitives: planes through the origin, reflections,
rigid motions and the sine crease curve.

Points and vectors are plain ``numpy`` arrays whose last axis has length 3;
every function that takes points accepts arbitrary leading batch shapes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

ORTHO_RENORMALIZE_THRESHOLD = 1e-10


def as_points(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape[-1:] != (3,):
        raise ValueError(f"expected trailing dimension 3, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class PlaneThroughOrigin:
    """Plane ``{p : p . n = 0}`` stored by its unit normal."""

    unit_normal: np.ndarray

    def __post_init__(self):
        nrm = np.array(self.unit_normal, dtype=float).reshape(3)
        length = float(np.linalg.norm(nrm))
        if not np.isfinite(length) or length == 0.0:
            raise ValueError("plane normal must be a finite non-zero vector")
        nrm = nrm / length
        nrm.setflags(write=False)
        object.__setattr__(self, "unit_normal", nrm)

    @classmethod
    def from_slope(cls, tau: float) -> "PlaneThroughOrigin":
        """The vertical plane ``y = tau * x``."""
        return cls(np.array([tau, -1.0, 0.0]))

    def signed_distance(self, p) -> np.ndarray:
        return as_points(p) @ self.unit_normal


def reflect(plane: PlaneThroughOrigin, p) -> np.ndarray:
    """Householder reflection ``p - 2 (p . n) n`` across ``plane``."""
    pts = as_points(p)
    nrm = plane.unit_normal
    return pts - 2.0 * (pts @ nrm)[..., None] * nrm


def _orthogonality_defect(a: np.ndarray) -> float:
    return float(np.max(np.abs(a.T @ a - np.eye(3))))


def _nearest_orthogonal(a: np.ndarray) -> np.ndarray:
    u, _, vt = np.linalg.svd(a)
    return u @ vt


@dataclass(frozen=True)
class RigidMotion:
    """Affine isometry ``p -> linear @ p + translation``.

    ``renormalizations`` counts how many times the linear part was projected
    back onto the orthogonal group while this motion was being built.
    """

    linear: np.ndarray
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    renormalizations: int = 0

    def __post_init__(self):
        lin = np.array(self.linear, dtype=float).reshape(3, 3)
        t = np.array(self.translation, dtype=float).reshape(3)
        lin.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", t)

    @property
    def proper(self) -> bool:
        return bool(np.linalg.det(self.linear) > 0.0)

    @property
    def orthogonality_defect(self) -> float:
        return _orthogonality_defect(self.linear)

    @classmethod
    def identity(cls) -> "RigidMotion":
        return cls(np.eye(3))

    @classmethod
    def translation_by(cls, vec) -> "RigidMotion":
        return cls(np.eye(3), np.asarray(vec, dtype=float))

    @classmethod
    def reflection(cls, plane: PlaneThroughOrigin) -> "RigidMotion":
        nrm = plane.unit_normal
        return cls(np.eye(3) - 2.0 * np.outer(nrm, nrm))

    @classmethod
    def rotation(cls, axis, angle: float) -> "RigidMotion":
        """Right-handed rotation about a line through the origin (Rodrigues)."""
        k = np.asarray(axis, dtype=float)
        k = k / np.linalg.norm(k)
        kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
        lin = np.eye(3) + math.sin(angle) * kx + (1.0 - math.cos(angle)) * (kx @ kx)
        return cls(lin)

    def apply(self, p) -> np.ndarray:
        pts = as_points(p)
        return pts @ self.linear.T + self.translation

    def apply_vector(self, d) -> np.ndarray:
        return as_points(d) @ self.linear.T

    def inverse(self) -> "RigidMotion":
        lin_inv = self.linear.T
        return RigidMotion(lin_inv, -lin_inv @ self.translation, self.renormalizations)

    def __call__(self, p) -> np.ndarray:
        return self.apply(p)

    def __matmul__(self, other: "RigidMotion") -> "RigidMotion":
        return compose(self, other)


def compose(a: RigidMotion, b: RigidMotion) -> RigidMotion:
    """``a o b``, i.e. ``p -> a(b(p))``.

    The linear part is projected onto the nearest orthogonal matrix when its
    defect exceeds ``ORTHO_RENORMALIZE_THRESHOLD``; each projection is counted.
    """
    lin = a.linear @ b.linear
    count = a.renormalizations + b.renormalizations
    if _orthogonality_defect(lin) > ORTHO_RENORMALIZE_THRESHOLD:
        lin = _nearest_orthogonal(lin)
        count += 1
    return RigidMotion(lin, a.linear @ b.translation + a.translation, count)


@dataclass(frozen=True)
class SineCurve:
    """Planar graph ``u -> (u, amplitude * sin(u / radius))`` on ``[u_min, u_max]``."""

    amplitude: float
    radius: float
    u_min: float
    u_max: float

    def _check(self, u):
        u = np.asarray(u, dtype=float)
        slack = 1e-12 * max(1.0, abs(self.u_min), abs(self.u_max))
        if np.any(u < self.u_min - slack) or np.any(u > self.u_max + slack):
            raise DomainError(
                f"parameter outside [{self.u_min}, {self.u_max}]"
            )
        return u

    def g(self, u):
        return self.amplitude * np.sin(np.asarray(u, dtype=float) / self.radius)

    def dg(self, u):
        return self.amplitude / self.radius * np.cos(np.asarray(u, dtype=float) / self.radius)

    def d2g(self, u):
        return -self.amplitude / self.radius**2 * np.sin(np.asarray(u, dtype=float) / self.radius)

    def point(self, u) -> np.ndarray:
        u = self._check(u)
        return np.stack([u, self.g(u)], axis=-1)


# Spec-facing alias: the only planar curves in the construction are sines.
PlanarCurve = SineCurve


def planar_curvature(curve: SineCurve, u):
    """Unsigned curvature ``|g''| / (1 + g'^2)^(3/2)`` of the graph curve."""
    u = curve._check(u)
    d1 = curve.dg(u)
    d2 = curve.d2g(u)
    kappa = np.abs(d2) / (1.0 + d1 * d1) ** 1.5
    return float(kappa) if np.ndim(kappa) == 0 else kappa


def miter_turn_angle(tau: float) -> float:
    """Angle between ``(0, 1, 0)`` and its mirror image across ``y = tau x``."""
    if not tau > 0.0:
        raise DomainError("tau must be positive")
    if math.isinf(tau):
        return 0.0
    t2 = tau * tau
    return math.acos((t2 - 1.0) / (t2 + 1.0))


def distance_to_line(p, point, direction) -> np.ndarray:
    """Euclidean distance from points to the infinite line ``point + t direction``."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    rel = as_points(p) - np.asarray(point, dtype=float)
    perp = rel - (rel @ d)[..., None] * d
    return np.linalg.norm(perp, axis=-1)
