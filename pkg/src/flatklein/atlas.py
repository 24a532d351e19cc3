"""The flat rectangle with its edge identifications, and the map that wraps
it onto ``n`` equal cylinders around a regular ``n``-gon.

Strip ``k`` occupies ``v in [k s - s/2, k s + s/2]`` and is a mirrored copy
of the single elbow: ``phi(u, v) = G_k(elbow((-1)**k u, v - k s))``.  The
motions satisfy ``G_{k+1} = G_k o reflect o T_s o M_x`` where ``M_x`` flips
the x coordinate (realising ``u -> -u`` on the cylinder) and ``T_s`` shifts
by ``s`` along the axis.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .crease import ElbowSpec, fold_dihedral
from .errors import ConfigurationError, ConstructionError, DomainError
from .geometry import RigidMotion, compose, distance_to_line

CLOSURE_LIMIT = 1e-6


class Orientability(str, enum.Enum):
    ORIENTABLE = "orientable"
    NON_ORIENTABLE = "non_orientable"


@dataclass(frozen=True)
class FigureConfig:
    n: int = 3
    r: float = 1.0
    s: float = 2.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ConfigurationError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.n < 3:
            raise ConfigurationError(f"degenerate polygon: n={self.n} (need n >= 3)")
        for name in ("r", "s"):
            val = float(getattr(self, name))
            if not (math.isfinite(val) and val > 0.0):
                raise ConfigurationError(f"{name} must be a positive finite number, got {val}")
            object.__setattr__(self, name, val)
        limit = 2.0 * self.r * self.tau
        if not self.s > limit:
            raise ConfigurationError(
                f"crease exceeds strip: strip height {self.s} must exceed 2 r cot(pi/n) = {limit:.6g}"
            )

    @property
    def tau(self) -> float:
        return 1.0 / math.tan(math.pi / self.n)

    @property
    def elbow(self) -> ElbowSpec:
        return ElbowSpec(r=self.r, tau=self.tau, s=self.s)

    @property
    def klein(self) -> bool:
        return self.n % 2 == 1


@dataclass(frozen=True)
class FlatDomain:
    """Rectangle ``[-pi r, pi r] x [-s/2, n s - s/2]`` with its identifications.

    Vertical edges are glued directly.  The horizontal edges are glued with a
    flip ``u -> -u`` (Klein bottle) when ``n`` is odd and directly (torus)
    when ``n`` is even.
    """

    config: FigureConfig

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def u_min(self) -> float:
        return -math.pi * self.config.r

    @property
    def u_max(self) -> float:
        return math.pi * self.config.r

    @property
    def width(self) -> float:
        return 2.0 * math.pi * self.config.r

    @property
    def v_min(self) -> float:
        return -0.5 * self.config.s

    @property
    def v_max(self) -> float:
        return self.n * self.config.s - 0.5 * self.config.s

    @property
    def height(self) -> float:
        return self.n * self.config.s

    @property
    def klein(self) -> bool:
        return self.config.klein

    @property
    def flip(self) -> float:
        """Sign applied to ``u`` when crossing the horizontal edge."""
        return -1.0 if self.klein else 1.0

    def strip_center(self, k: int) -> float:
        return k * self.config.s

    @staticmethod
    def strip_sign(k: int) -> float:
        return 1.0 if k % 2 == 0 else -1.0

    @property
    def strip_centers(self) -> list[float]:
        return [self.strip_center(k) for k in range(self.n)]

    @property
    def strip_signs(self) -> list[float]:
        return [self.strip_sign(k) for k in range(self.n)]

    def crease_v(self, k: int, u):
        cfg = self.config
        return self.strip_center(k) + self.strip_sign(k) * cfg.tau * cfg.r * np.sin(np.asarray(u, dtype=float) / cfg.r)

    def strip_of(self, v):
        k = np.floor((np.asarray(v, dtype=float) - self.v_min) / self.config.s).astype(int)
        return np.clip(k, 0, self.n - 1)

    def inflection_points(self) -> list[tuple[float, float]]:
        """Two per crease: ``u = -pi r`` (glued to ``+pi r``) and ``u = 0``."""
        return [(u, self.strip_center(k)) for k in range(self.n) for u in (self.u_min, 0.0)]

    def contains(self, u, v, slack: float = 1e-12) -> np.ndarray:
        scale = max(self.width, self.height)
        tol = slack * scale
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return (u >= self.u_min - tol) & (u <= self.u_max + tol) & (v >= self.v_min - tol) & (v <= self.v_max + tol)

    def wrap(self, u, v):
        """Representative inside the rectangle of an arbitrary plane point."""
        u = np.array(u, dtype=float)
        v = np.array(v, dtype=float)
        u, v = np.broadcast_arrays(u, v)
        u = u.copy()
        v = v.copy()
        m = np.floor((v - self.v_min) / self.height)
        v = v - m * self.height
        if self.klein:
            u = np.where(np.mod(m, 2) == 1, -u, u)
        outside = (u < self.u_min) | (u > self.u_max)
        u = np.where(outside, np.mod(u - self.u_min, self.width) + self.u_min, u)
        return u, v

    def vertical_partner(self, v):
        """``(-pi r, v)`` is glued to ``(pi r, v)``."""
        return (self.u_max, np.asarray(v, dtype=float))

    def horizontal_partner(self, u):
        """Bottom-edge point ``(u, v_min)`` is glued to ``(flip * u, v_max)``."""
        return (self.flip * np.asarray(u, dtype=float), self.v_max)

    def quotient_distance(self, a, b) -> np.ndarray:
        """Distance between points of the rectangle in the glued surface.

        Exact for points closer than half the rectangle's shorter side.
        """
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        best = np.full(np.broadcast_shapes(a.shape[:-1], b.shape[:-1]), np.inf)
        for m in (-1, 0, 1):
            ub = b[..., 0] * (self.flip if m % 2 else 1.0)
            vb = b[..., 1] + m * self.height
            for j in (-1, 0, 1):
                d = np.hypot(a[..., 0] - (ub + j * self.width), a[..., 1] - vb)
                best = np.minimum(best, d)
        return best


def build_domain(config: FigureConfig) -> FlatDomain:
    return FlatDomain(config)


@dataclass(frozen=True)
class AtlasMap:
    config: FigureConfig
    domain: FlatDomain
    motions: tuple[RigidMotion, ...]
    closure_residual: float = 0.0

    @cached_property
    def elbow(self) -> ElbowSpec:
        return self.config.elbow

    @cached_property
    def _lin(self) -> np.ndarray:
        return np.ascontiguousarray(np.stack([g.linear for g in self.motions]))

    @cached_property
    def _trans(self) -> np.ndarray:
        return np.ascontiguousarray(np.stack([g.translation for g in self.motions]))

    @cached_property
    def _nrm(self) -> np.ndarray:
        return np.ascontiguousarray(self.elbow.plane.unit_normal.copy())

    @property
    def renormalizations(self) -> int:
        return max(g.renormalizations for g in self.motions)

    # -- batch piece interface ---------------------------------------------
    def _flat(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        shape = np.broadcast_shapes(u.shape, v.shape)
        uu = np.ascontiguousarray(np.broadcast_to(u, shape).ravel())
        vv = np.ascontiguousarray(np.broadcast_to(v, shape).ravel())
        return uu, vv, shape

    def locate(self, u, v, backend=None):
        """Strip index and side (1 = above the crease) of domain points."""
        uu, vv, shape = self._flat(u, v)
        cfg = self.config
        k, up = kernels.get_backend(backend).locate(uu, vv, cfg.r, cfg.tau, cfg.s, cfg.n)
        return k.reshape(shape), up.reshape(shape)

    def evaluate(self, u, v, strip, upper, backend=None) -> np.ndarray:
        """Evaluate the smooth sheet ``(strip, upper)`` at ``(u, v)``.

        The sheet formula extends past its own region, which is what one-sided
        finite differences need.
        """
        uu, vv, shape = self._flat(u, v)
        kk = np.ascontiguousarray(np.broadcast_to(np.asarray(strip, dtype=np.int64), shape).ravel())
        up = np.ascontiguousarray(np.broadcast_to(np.asarray(upper, dtype=np.uint8), shape).ravel())
        cfg = self.config
        out = kernels.get_backend(backend).evaluate_pieces(
            uu, vv, kk, up, self._lin, self._trans, cfg.r, cfg.tau, cfg.s, self._nrm
        )
        return out.reshape(shape + (3,))

    def jacobian(self, u, v, strip=None, upper=None, backend=None) -> np.ndarray:
        """Analytic Jacobian columns ``(dphi/du, dphi/dv)``, shape ``(..., 3, 2)``."""
        if strip is None or upper is None:
            strip, upper = self.locate(u, v, backend)
        uu, vv, shape = self._flat(u, v)
        kk = np.ascontiguousarray(np.broadcast_to(np.asarray(strip, dtype=np.int64), shape).ravel())
        up = np.ascontiguousarray(np.broadcast_to(np.asarray(upper, dtype=np.uint8), shape).ravel())
        cfg = self.config
        out = kernels.get_backend(backend).jacobian_pieces(
            uu, vv, kk, up, self._lin, self._trans, cfg.r, cfg.tau, cfg.s, self._nrm
        )
        return out.reshape(shape + (3, 2))

    def __call__(self, u, v) -> np.ndarray:
        return phi(self, u, v)

    # -- image geometry ------------------------------------------------------
    def vertices(self) -> np.ndarray:
        """Polygon vertices: the image of each strip's local origin."""
        return np.stack([g.apply(np.zeros(3)) for g in self.motions])

    def axis_lines(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """``(point, unit direction)`` of the cylinder axis of tube ``k``.

        Tube ``k`` is the cylinder entering joint ``k``; it carries the lower
        sheet of strip ``k`` and the upper sheet of strip ``k - 1``.
        """
        y = np.array([0.0, 1.0, 0.0])
        return [(g.apply(np.zeros(3)), g.apply_vector(y)) for g in self.motions]

    def tube_of(self, strip, upper):
        return (np.asarray(strip) + np.asarray(upper, dtype=int)) % self.config.n

    def outward_normal(self, points, strip, upper) -> np.ndarray:
        tube = self.tube_of(strip, upper)
        pts = np.asarray(points, dtype=float)
        lines = self.axis_lines()
        base = np.stack([lines[t][0] for t in range(self.config.n)])[tube]
        dirs = np.stack([lines[t][1] for t in range(self.config.n)])[tube]
        rel = pts - base
        perp = rel - np.sum(rel * dirs, axis=-1, keepdims=True) * dirs
        return perp / np.linalg.norm(perp, axis=-1, keepdims=True)

    def tube_distance_residual(self, points) -> np.ndarray:
        """``min_k | dist(p, axis_k) - r |`` for each point."""
        pts = np.asarray(points, dtype=float)
        res = np.full(pts.shape[:-1], np.inf)
        for base, direction in self.axis_lines():
            res = np.minimum(res, np.abs(distance_to_line(pts, base, direction) - self.config.r))
        return res


def chain_motions(config: FigureConfig) -> AtlasMap:
    elbow_spec = config.elbow
    mirror_x = RigidMotion(np.diag([-1.0, 1.0, 1.0]))
    shift = RigidMotion.translation_by([0.0, config.s, 0.0])
    step = compose(RigidMotion.reflection(elbow_spec.plane), compose(shift, mirror_x))
    motions = [RigidMotion.identity()]
    for _ in range(config.n - 1):
        motions.append(compose(motions[-1], step))
    wrap = compose(motions[-1], step)
    residual = max(
        float(np.max(np.abs(wrap.linear - np.eye(3)))),
        float(np.max(np.abs(wrap.translation))),
    )
    if residual > CLOSURE_LIMIT:
        raise ConstructionError(f"chained motions do not close up: residual {residual:.3e}")
    return AtlasMap(config, build_domain(config), tuple(motions), residual)


def build_atlas(config: FigureConfig | None = None, **kwargs) -> AtlasMap:
    if config is None:
        config = FigureConfig(**kwargs)
    return chain_motions(config)


def phi(atlas: AtlasMap, u, v) -> np.ndarray:
    """The piecewise isometry on the rectangle; raises outside it."""
    if not np.all(atlas.domain.contains(u, v)):
        raise DomainError("point lies outside the domain rectangle")
    strip, upper = atlas.locate(u, v)
    return atlas.evaluate(u, v, strip, upper)


def phi_wrapped(atlas: AtlasMap, u, v) -> np.ndarray:
    """``phi`` extended to the whole plane through the identifications."""
    uw, vw = atlas.domain.wrap(u, v)
    strip, upper = atlas.locate(uw, vw)
    return atlas.evaluate(uw, vw, strip, upper)


def handedness(atlas: AtlasMap, u, v) -> np.ndarray:
    """Sign of ``det[dphi/du, dphi/dv, outward normal]``."""
    strip, upper = atlas.locate(u, v)
    jac = atlas.jacobian(u, v, strip, upper)
    pts = atlas.evaluate(u, v, strip, upper)
    nrm = atlas.outward_normal(pts, strip, upper)
    det = np.sum(np.cross(jac[..., 0], jac[..., 1]) * nrm, axis=-1)
    return np.sign(det)


def handedness_flips(atlas: AtlasMap, u0: float | None = None, samples: int = 4001) -> int:
    """Number of handedness sign changes along ``u = u0`` from bottom to top."""
    dom = atlas.domain
    if u0 is None:
        u0 = 0.37 * atlas.config.r
    if abs(math.sin(u0 / atlas.config.r)) < 1e-6:
        raise DomainError("the vertical path must avoid the inflection columns")
    v = np.linspace(dom.v_min, dom.v_max, samples)
    signs = handedness(atlas, np.full_like(v, u0), v)
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def orientability(config: FigureConfig) -> Orientability:
    """Orientable iff the handedness flips an even number of times around a
    vertical loop; cross-checked against the parity of ``n``."""
    flips = handedness_flips(chain_motions(config))
    measured = Orientability.ORIENTABLE if flips % 2 == 0 else Orientability.NON_ORIENTABLE
    expected = Orientability.NON_ORIENTABLE if config.klein else Orientability.ORIENTABLE
    if measured is not expected:
        raise ConstructionError(f"handedness parity ({flips} flips) disagrees with n={config.n}")
    return measured


@dataclass(frozen=True)
class CreaseCurve:
    strip: int
    center: float
    sign: float
    amplitude: float
    radius: float
    fails: str = "I"

    def domain_points(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        v = self.center + self.sign * self.amplitude * np.sin(u / self.radius)
        return np.stack([u, v], axis=-1)


@dataclass(frozen=True)
class ExceptionalPoint:
    strip: int
    domain_uv: tuple[float, float]
    image_xyz: tuple[float, float, float]
    dihedral: float
    fails: str = "II"


@dataclass(frozen=True)
class ExceptionalSets:
    crease_curves: list[CreaseCurve]
    inflection_points: list[ExceptionalPoint]
    intersection_curves: list

    def image_of_crease(self, atlas: AtlasMap, k: int, u) -> np.ndarray:
        pts = self.crease_curves[k].domain_points(u)
        return atlas.evaluate(pts[..., 0], pts[..., 1], k, 0)


def exceptional_sets(atlas: AtlasMap) -> ExceptionalSets:
    """Where properties I (smoothness), II (local isometry) and III
    (injectivity) fail: creases, their inflection points, and the
    pass-through curves of adjacent cylinders."""
    from .analysis.intersections import intersection_closed_form

    cfg = atlas.config
    dom = atlas.domain
    creases = [
        CreaseCurve(k, dom.strip_center(k), dom.strip_sign(k), cfg.tau * cfg.r, cfg.r)
        for k in range(cfg.n)
    ]
    points = []
    for k in range(cfg.n):
        for u in (dom.u_min, 0.0):
            v = dom.strip_center(k)
            xyz = atlas.evaluate(u, v, k, 0)
            local_u = dom.strip_sign(k) * u
            points.append(
                ExceptionalPoint(
                    strip=k,
                    domain_uv=(float(u), float(v)),
                    image_xyz=tuple(float(c) for c in xyz),
                    dihedral=fold_dihedral(cfg.elbow, local_u),
                )
            )
    curves = [intersection_closed_form(atlas, k) for k in range(cfg.n)]
    return ExceptionalSets(creases, points, curves)
