"""Residual-style checks of the claimed geometric properties."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..atlas import AtlasMap, handedness_flips, phi_wrapped
from scipy.integrate import quad

from ..crease import crease_of, curvature_condition, f1, fold_dihedral
from ..geometry import distance_to_line
from .intersections import (
    distance_to_curve,
    hausdorff_to_curve,
    intersection_closed_form,
    intersection_oracle,
    split_by_plane,
)

FD_STEP = 1e-5
CREASE_NUDGE = 1e-9


@dataclass(frozen=True)
class Tolerances:
    analytic: float = 1e-12
    chain: float = 1e-9
    fd: float = 1e-6
    cone: float = 1e-4


@dataclass(frozen=True)
class CheckResult:
    name: str
    samples: int
    max_residual: float
    tolerance: float
    notes: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.max_residual < self.tolerance)

    # ``pass`` is a keyword, so the field is exposed under both spellings
    @property
    def pass_(self) -> bool:
        return self.passed

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": int(self.samples),
            "max_residual": float(self.max_residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
            "notes": self.notes,
        }

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: residual {self.max_residual:.3e} < {self.tolerance:.1e} ({self.samples} samples) {self.notes}".rstrip()


class ScaledMap:
    """Uniform scaling of an atlas map; used to confirm that the metric check
    detects a non-isometry."""

    def __init__(self, atlas: AtlasMap, factor: float):
        self.atlas = atlas
        self.factor = factor
        self.config = atlas.config
        self.domain = atlas.domain

    def locate(self, u, v):
        return self.atlas.locate(u, v)

    def evaluate(self, u, v, strip, upper):
        return self.factor * self.atlas.evaluate(u, v, strip, upper)

    def jacobian(self, u, v, strip=None, upper=None):
        return self.factor * self.atlas.jacobian(u, v, strip, upper)


def stratified_samples(atlas: AtlasMap, n_samples: int, rng: np.random.Generator):
    """Equal numbers of points on each side of each crease.

    Returns ``(u, v, strip, upper)``.  Points that land within
    ``CREASE_NUDGE * r`` of a crease are pushed off it, into their own side.
    """
    cfg = atlas.config
    dom = atlas.domain
    strata = 2 * cfg.n
    per = max(1, n_samples // strata)
    us, vs, ks, ups = [], [], [], []
    nudge = CREASE_NUDGE * cfg.r
    for k in range(cfg.n):
        bottom = dom.strip_center(k) - 0.5 * cfg.s
        top = dom.strip_center(k) + 0.5 * cfg.s
        for upper in (0, 1):
            u = rng.uniform(dom.u_min, dom.u_max, per)
            crease = dom.crease_v(k, u)
            lo = crease if upper else np.full(per, bottom)
            hi = np.full(per, top) if upper else crease
            v = lo + (hi - lo) * rng.uniform(0.0, 1.0, per)
            if upper:
                v = np.maximum(v, crease + nudge)
            else:
                v = np.minimum(v, crease - nudge)
            us.append(u)
            vs.append(v)
            ks.append(np.full(per, k, dtype=np.int64))
            ups.append(np.full(per, upper, dtype=np.uint8))
    return np.concatenate(us), np.concatenate(vs), np.concatenate(ks), np.concatenate(ups)


def metric_residual(map_, n_samples: int = 10_000, mode: str = "analytic", seed: int = 0,
                    tolerance: float | None = None, samples=None) -> CheckResult:
    """Max ``|J^T J - I|`` over stratified samples.

    ``analytic`` uses closed-form Jacobians; ``finite_difference`` uses
    central differences of the one-sided sheet with step ``1e-5 r``.
    """
    if samples is None:
        samples = stratified_samples(map_.atlas if isinstance(map_, ScaledMap) else map_, n_samples, np.random.default_rng(seed))
    u, v, strip, upper = samples
    if mode == "analytic":
        jac = map_.jacobian(u, v, strip, upper)
        tol = 1e-12 if tolerance is None else tolerance
    elif mode == "finite_difference":
        h = FD_STEP * map_.config.r
        du = (map_.evaluate(u + h, v, strip, upper) - map_.evaluate(u - h, v, strip, upper)) / (2 * h)
        dv = (map_.evaluate(u, v + h, strip, upper) - map_.evaluate(u, v - h, strip, upper)) / (2 * h)
        jac = np.stack([du, dv], axis=-1)
        tol = 1e-6 if tolerance is None else tolerance
    else:
        raise ValueError(f"unknown mode {mode!r}")
    gram = np.einsum("nki,nkj->nij", jac, jac)
    residual = float(np.max(np.abs(gram - np.eye(2))))
    return CheckResult(f"metric_{mode}", len(u), residual, tol)


def crease_continuity(atlas: AtlasMap, samples: int = 1000, tolerance: float = 1e-12) -> CheckResult:
    dom = atlas.domain
    u = np.linspace(dom.u_min, dom.u_max, samples)
    worst = 0.0
    for k in range(atlas.config.n):
        v = dom.crease_v(k, u)
        gap = atlas.evaluate(u, v, k, 0) - atlas.evaluate(u, v, k, 1)
        worst = max(worst, float(np.max(np.linalg.norm(gap, axis=-1))))
    return CheckResult("crease_continuity", samples * atlas.config.n, worst, tolerance)


def strip_boundary_continuity(atlas: AtlasMap, samples: int = 1000, tolerance: float = 1e-9) -> CheckResult:
    dom = atlas.domain
    cfg = atlas.config
    u = np.linspace(dom.u_min, dom.u_max, samples)
    worst = 0.0
    for k in range(cfg.n - 1):
        v = np.full_like(u, dom.strip_center(k) + 0.5 * cfg.s)
        gap = atlas.evaluate(u, v, k, 1) - atlas.evaluate(u, v, k + 1, 0)
        worst = max(worst, float(np.max(np.linalg.norm(gap, axis=-1))))
    return CheckResult("strip_boundary_continuity", samples * (cfg.n - 1), worst, tolerance)


def _edge_pieces(atlas, u, v):
    strip, upper = atlas.locate(u, v)
    return atlas.evaluate(u, v, strip, upper)


def vertical_identification(atlas: AtlasMap, samples: int = 1000, tolerance: float = 1e-12) -> CheckResult:
    dom = atlas.domain
    v = np.linspace(dom.v_min, dom.v_max, samples)
    left = _edge_pieces(atlas, np.full_like(v, dom.u_min), v)
    right = _edge_pieces(atlas, np.full_like(v, dom.u_max), v)
    worst = float(np.max(np.linalg.norm(left - right, axis=-1)))
    return CheckResult("vertical_identification", samples, worst, tolerance)


def horizontal_identification(atlas: AtlasMap, samples: int = 1000, tolerance: float = 1e-9,
                              flip: float | None = None, name: str | None = None) -> CheckResult:
    """``phi(u, bottom) == phi(flip * u, top)``; ``flip`` defaults to the
    domain's own identification."""
    dom = atlas.domain
    if flip is None:
        flip = dom.flip
    # odd sample count keeps u = +-pi r/2 (the worst case for a wrong flip) on the grid
    count = samples + 1 if samples % 4 == 0 else samples
    u = np.linspace(dom.u_min, dom.u_max, count)
    bottom = _edge_pieces(atlas, u, np.full_like(u, dom.v_min))
    top = _edge_pieces(atlas, flip * u, np.full_like(u, dom.v_max))
    worst = float(np.max(np.linalg.norm(bottom - top, axis=-1)))
    kind = "klein" if flip < 0 else "torus"
    return CheckResult(name or f"horizontal_identification_{kind}", count, worst, tolerance)


def crease_and_closure_checks(atlas: AtlasMap, tol: Tolerances = Tolerances(), samples: int = 1000) -> list[CheckResult]:
    return [
        crease_continuity(atlas, samples, tol.analytic),
        strip_boundary_continuity(atlas, samples, tol.chain),
        vertical_identification(atlas, samples, tol.analytic),
        horizontal_identification(atlas, samples, tol.chain),
    ]


def curvature_sweep(atlas: AtlasMap, samples: int = 1000) -> CheckResult:
    """``kappa_image > kappa_domain`` along every crease.

    The residual is the negated minimum margin, so it passes below 0.
    """
    cfg = atlas.config
    u = np.linspace(-math.pi * cfg.r, math.pi * cfg.r, samples)
    margin = math.inf
    for _ in range(cfg.n):
        k_img, k_dom = curvature_condition(cfg.elbow, u)
        margin = min(margin, float(np.min(k_img - k_dom)))
    return CheckResult(
        "curvature_condition", samples * cfg.n, -margin, 0.0,
        notes=f"min(kappa_image - kappa_domain) = {margin:.6g}",
    )


def handedness_check(atlas: AtlasMap, u0: float | None = None) -> CheckResult:
    n = atlas.config.n
    flips = handedness_flips(atlas, u0)
    parity_ok = (flips % 2 == 1) == atlas.domain.klein
    residual = abs(flips - n) + (0 if parity_ok else 1)
    kind = "non_orientable" if flips % 2 else "orientable"
    return CheckResult("handedness_parity", 4001, float(residual), 0.5,
                       notes=f"{flips} flips along a vertical loop; {kind}")


def tube_containment(atlas: AtlasMap, n_samples: int = 10_000, seed: int = 0, tolerance: float = 1e-9) -> CheckResult:
    u, v, strip, upper = stratified_samples(atlas, n_samples, np.random.default_rng(seed))
    pts = atlas.evaluate(u, v, strip, upper)
    worst = float(np.max(atlas.tube_distance_residual(pts)))
    return CheckResult("tube_containment", len(u), worst, tolerance)


def vertex_closure(atlas: AtlasMap, tolerance: float = 1e-9) -> CheckResult:
    """Consecutive polygon vertices are ``s`` apart, the polygon is planar and
    regular, and stepping once more returns to the start."""
    cfg = atlas.config
    verts = atlas.vertices()
    nxt = np.roll(verts, -1, axis=0)
    edges = np.linalg.norm(nxt - verts, axis=-1)
    centroid = verts.mean(axis=0)
    radii = np.linalg.norm(verts - centroid, axis=-1)
    circum = cfg.s / (2.0 * math.sin(math.pi / cfg.n))
    # planarity: distance of every vertex from the plane of the first three
    normal = np.cross(verts[1] - verts[0], verts[2] - verts[0])
    normal = normal / np.linalg.norm(normal)
    planarity = np.abs((verts - verts[0]) @ normal)
    residual = max(
        float(np.max(np.abs(edges - cfg.s))),
        float(np.max(np.abs(radii - circum))),
        float(np.max(planarity)),
        atlas.closure_residual,
    )
    return CheckResult("vertex_closure", cfg.n, residual, tolerance,
                       notes=f"regular {cfg.n}-gon with edge {cfg.s:g}")


def _piece_labels(atlas: AtlasMap, u, v) -> np.ndarray:
    uw, vw = atlas.domain.wrap(u, v)
    strip, upper = atlas.locate(uw, vw)
    return 2 * strip.astype(np.int64) + upper


def cone_angle(atlas: AtlasMap, point, eps: float, samples: int = 4096) -> float:
    """Image length of the domain circle of radius ``eps`` about ``point``,
    divided by ``eps``; the circle is carried through the identifications.

    Where consecutive samples fall on different sheets, the crossing is
    located by bisection and inserted, so chords never cut across a fold.
    """
    u0, v0 = point
    theta = np.linspace(0.0, 2.0 * math.pi, samples + 1)

    def circle(t):
        return u0 + eps * np.cos(t), v0 + eps * np.sin(t)

    labels = _piece_labels(atlas, *circle(theta))
    change = np.nonzero(labels[1:] != labels[:-1])[0]
    lo, hi = theta[change].copy(), theta[change + 1].copy()
    left = labels[change]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        same = _piece_labels(atlas, *circle(mid)) == left
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    t = np.sort(np.concatenate([theta, 0.5 * (lo + hi)]))
    pts = phi_wrapped(atlas, *circle(t))
    seg = np.diff(pts, axis=0)
    return float(np.sum(np.linalg.norm(seg, axis=-1)) / eps)


def cone_angle_checks(atlas: AtlasMap, tolerance: float = 1e-4, eps_factor: float = 1e-3) -> list[CheckResult]:
    cfg = atlas.config
    dom = atlas.domain
    eps = eps_factor * cfg.r
    regular = [(0.5 * cfg.r, dom.strip_center(k) + 0.5 * cfg.s - 0.1 * (cfg.s - 2 * cfg.tau * cfg.r)) for k in range(cfg.n)]
    crease_u = 0.5 * math.pi * cfg.r
    creased = [(crease_u, float(dom.crease_v(k, crease_u))) for k in range(cfg.n)]
    creased += [(-1.0 * cfg.r, float(dom.crease_v(k, -1.0 * cfg.r))) for k in range(cfg.n)]
    out = []
    for name, pts in (("cone_angle_regular", regular), ("cone_angle_crease", creased)):
        worst = max(abs(cone_angle(atlas, p, eps) - 2 * math.pi) for p in pts)
        out.append(CheckResult(name, len(pts), worst, tolerance, notes=f"eps = {eps:g}"))
    return out


def inflection_dihedral(atlas: AtlasMap, tolerance: float = 1e-9) -> CheckResult:
    """Fold angle is pi at exactly the 2n inflection points."""
    cfg = atlas.config
    pts = atlas.domain.inflection_points()
    worst = 0.0
    for k in range(cfg.n):
        for u in (-math.pi * cfg.r, 0.0, math.pi * cfg.r):
            worst = max(worst, abs(fold_dihedral(cfg.elbow, u) - math.pi))
    count_residual = abs(len(pts) - 2 * cfg.n)
    return CheckResult("inflection_points", len(pts), max(worst, float(count_residual)), tolerance,
                       notes=f"{len(pts)} inflection points (expected {2 * cfg.n})")


def predicted_curve_points(atlas: AtlasMap, per_curve: int = 20_000) -> np.ndarray:
    return np.vstack([intersection_closed_form(atlas, k).sample_image(per_curve) for k in range(atlas.config.n)])


def injectivity_scan(atlas: AtlasMap, n_samples: int = 100_000, eps: float | None = None, seed: int = 0,
                     curve_points: np.ndarray | None = None) -> CheckResult:
    """Collision scan for property III.

    Pairs of samples closer than ``eps`` in space but farther than ``10 eps``
    apart on the glued surface are collisions; each must sit within ``10 eps``
    of a predicted pass-through curve.
    """
    cfg = atlas.config
    if eps is None:
        eps = 1e-3 * cfg.r
    u, v, strip, upper = stratified_samples(atlas, n_samples, np.random.default_rng(seed))
    pts = atlas.evaluate(u, v, strip, upper)
    pairs = cKDTree(pts).query_pairs(eps, output_type="ndarray")
    if curve_points is None:
        curve_points = predicted_curve_points(atlas)
    worst = 0.0
    count = 0
    if len(pairs):
        uv = np.stack([u, v], axis=-1)
        sep = atlas.domain.quotient_distance(uv[pairs[:, 0]], uv[pairs[:, 1]])
        hits = pairs[sep > 10.0 * eps]
        count = len(hits)
        if count:
            mid = 0.5 * (pts[hits[:, 0]] + pts[hits[:, 1]])
            dist, _ = cKDTree(curve_points).query(mid)
            worst = float(np.max(dist))
    return CheckResult(
        "injectivity_locus", len(u), worst, 10.0 * eps,
        notes=f"{count} collisions off the identification, {len(pairs)} close pairs, eps = {eps:g}",
    )


def crease_arc_length(atlas: AtlasMap, tolerance: float = 1e-9) -> CheckResult:
    """Quadrature length of the crease equals that of its image."""
    spec = atlas.config.elbow
    curve = crease_of(spec)
    r = spec.r

    def speed_domain(u):
        return math.hypot(1.0, float(curve.dg(u)))

    def speed_image(u):
        # five-point derivative of the evaluated image curve
        h = 1e-3 * r
        t = u + h * np.array([-2.0, -1.0, 1.0, 2.0])
        p = f1(spec, t, curve.g(t))
        d = (p[0] - 8.0 * p[1] + 8.0 * p[2] - p[3]) / (12.0 * h)
        return float(np.linalg.norm(d))

    spans = [(-math.pi * r, math.pi * r), (0.0, 0.5 * math.pi * r), (-2.0 * r, 0.7 * r)]
    worst = 0.0
    for a, b in spans:
        lo, _ = quad(speed_domain, a, b, epsabs=1e-13, epsrel=1e-13, limit=200)
        hi, _ = quad(speed_image, a, b, epsabs=1e-13, epsrel=1e-13, limit=200)
        worst = max(worst, abs(lo - hi))
    # polyline length of the actual image points as an independent cross-check
    u = np.linspace(-math.pi * r, math.pi * r, 200_001)
    pts = f1(spec, u, curve.g(u))
    poly = float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=-1)))
    full, _ = quad(speed_domain, -math.pi * r, math.pi * r, epsabs=1e-13, epsrel=1e-13, limit=200)
    return CheckResult("crease_arc_length", len(spans), worst, tolerance,
                       notes=f"full crease length {full:.12g}; image polyline {poly:.12g}")


def intersection_oracle_agreement(atlas: AtlasMap, grid_n: int = 256, tolerance: float = 1e-6) -> CheckResult:
    """One-sided Hausdorff distance from bisection-oracle points to the
    closed-form pass-through ellipse, worst over all joints."""
    worst = 0.0
    found = 0
    for k in range(atlas.config.n):
        curve = intersection_closed_form(atlas, k)
        oracle = intersection_oracle(atlas, k, grid_n)
        label = split_by_plane(oracle.points, curve.vertex, curve.fold_normal, curve.plane_normal)
        pts = oracle.points[label == 1]
        found += len(pts)
        worst = max(worst, hausdorff_to_curve(pts, curve))
    if found == 0:
        worst = math.inf
    return CheckResult("intersection_oracle_hausdorff", found, worst, tolerance,
                       notes=f"grid {grid_n}x{grid_n} per joint")


def intersection_on_axes(atlas: AtlasMap, per_curve: int = 2000, tolerance: float = 1e-9) -> CheckResult:
    """Every point of each pass-through curve is at distance ``r`` from both axes."""
    cfg = atlas.config
    lines = atlas.axis_lines()
    worst = 0.0
    for k in range(cfg.n):
        pts = intersection_closed_form(atlas, k).sample_image(per_curve, retained_only=False)
        for j in (k, (k + 1) % cfg.n):
            worst = max(worst, float(np.max(np.abs(distance_to_line(pts, *lines[j]) - cfg.r))))
    return CheckResult("intersection_on_both_tubes", per_curve * cfg.n, worst, tolerance)


SCALE_SENTINEL = 1.01


def scaled_map_sentinel(atlas: AtlasMap, n_samples: int = 10_000, seed: int = 0, tolerance: float = 1e-9) -> CheckResult:
    """The metric check applied to ``1.01 * phi`` must fail with residual
    ``1.01**2 - 1``; this check passes when the detector fires as expected."""
    probe = metric_residual(ScaledMap(atlas, SCALE_SENTINEL), n_samples, seed=seed)
    expected = SCALE_SENTINEL ** 2 - 1.0
    residual = abs(probe.max_residual - expected) if not probe.passed else math.inf
    return CheckResult("sentinel_scaled_map", probe.samples, residual, tolerance,
                       notes=f"scaled metric residual {probe.max_residual:.6g}, expected {expected:.6g}, inner pass = {probe.passed}")


def mirror_sentinel(atlas: AtlasMap, tolerance: float = 1e-9) -> CheckResult:
    """The horizontal identification with the ``u`` flip inverted must fail;
    its worst gap is the tube diameter ``2r``."""
    probe = horizontal_identification(atlas, flip=-atlas.domain.flip, name="inverted_flip")
    expected = 2.0 * atlas.config.r
    residual = abs(probe.max_residual - expected) if not probe.passed else math.inf
    return CheckResult("sentinel_inverted_identification", probe.samples, residual, tolerance,
                       notes=f"inverted identification gap {probe.max_residual:.6g}, inner pass = {probe.passed}")


def _distance_to_predicted(atlas: AtlasMap, points: np.ndarray) -> np.ndarray:
    best = np.full(len(points), np.inf)
    for k in range(atlas.config.n):
        curve = intersection_closed_form(atlas, k)
        lo, hi = curve.retained
        best = np.minimum(best, distance_to_curve(points, curve.image, lo, hi))
    return best


def refine_crossings(atlas: AtlasMap, a, b, iters: int = 30):
    """Drive each close pair of sheet points to an exact crossing.

    ``a`` and ``b`` are ``(u, v, strip, upper)`` tuples of equal length.
    Minimum-norm Gauss-Newton on ``P_a(x) - P_b(y) = 0`` keeps the solution
    next to the starting pair.  Returns ``(crossing, xa, xb)`` where
    ``crossing`` flags pairs whose sheets really meet on retained material.
    """
    ua, va, ka, pa = a
    ub, vb, kb, pb = b
    xa = np.stack([ua, va], axis=-1).astype(float)
    xb = np.stack([ub, vb], axis=-1).astype(float)
    for _ in range(iters):
        gap = atlas.evaluate(xa[:, 0], xa[:, 1], ka, pa) - atlas.evaluate(xb[:, 0], xb[:, 1], kb, pb)
        jac = np.concatenate([atlas.jacobian(xa[:, 0], xa[:, 1], ka, pa),
                              -atlas.jacobian(xb[:, 0], xb[:, 1], kb, pb)], axis=-1)
        step = np.einsum("nij,nj->ni", np.linalg.pinv(jac), gap)
        xa = xa - step[:, :2]
        xb = xb - step[:, 2:]
    pos_a = atlas.evaluate(xa[:, 0], xa[:, 1], ka, pa)
    pos_b = atlas.evaluate(xb[:, 0], xb[:, 1], kb, pb)
    r = atlas.config.r
    met = np.linalg.norm(pos_a - pos_b, axis=-1) < 1e-9 * r
    # the solution must lie on (or at the edge of) the material each piece covers
    on_a = np.linalg.norm(phi_wrapped(atlas, xa[:, 0], xa[:, 1]) - pos_a, axis=-1) < 1e-6 * r
    on_b = np.linalg.norm(phi_wrapped(atlas, xb[:, 0], xb[:, 1]) - pos_b, axis=-1) < 1e-6 * r
    wa = np.stack(atlas.domain.wrap(xa[:, 0], xa[:, 1]), axis=-1)
    wb = np.stack(atlas.domain.wrap(xb[:, 0], xb[:, 1]), axis=-1)
    distinct = atlas.domain.quotient_distance(wa, wb) > 1e-6 * r
    return met & on_a & on_b & distinct, xa, xb


def refined_injectivity_scan(atlas: AtlasMap, n_samples: int = 100_000, eps: float | None = None,
                             seed: int = 0, tolerance: float | None = None) -> CheckResult:
    """Collision scan with enough power to find collisions at all.

    Near the inflection images the two tubes are tangent, so sheets come
    within ``eps`` of each other without meeting.  Each close pair is refined
    to the exact crossing it approaches; pairs with no crossing are counted as
    near contacts, and every crossing must lie on a predicted curve.
    """
    cfg = atlas.config
    if eps is None:
        eps = 2e-2 * cfg.r
    if tolerance is None:
        tolerance = 1e-6 * cfg.r
    u, v, strip, upper = stratified_samples(atlas, n_samples, np.random.default_rng(seed))
    pts = atlas.evaluate(u, v, strip, upper)
    pairs = cKDTree(pts).query_pairs(eps, output_type="ndarray")
    uv = np.stack([u, v], axis=-1)
    if len(pairs):
        pairs = pairs[atlas.domain.quotient_distance(uv[pairs[:, 0]], uv[pairs[:, 1]]) > 10.0 * eps]
    if len(pairs) == 0:
        return CheckResult("injectivity_refined", len(u), math.inf, tolerance,
                           notes=f"no collisions found at eps = {eps:g}; scan has no power")
    i, j = pairs[:, 0], pairs[:, 1]
    crossing, xa, _ = refine_crossings(atlas, (u[i], v[i], strip[i], upper[i]), (u[j], v[j], strip[j], upper[j]))
    hits = atlas.evaluate(xa[crossing, 0], xa[crossing, 1], strip[i][crossing], upper[i][crossing])
    dist = _distance_to_predicted(atlas, hits)
    worst = float(dist.max()) if dist.size else 0.0
    return CheckResult(
        "injectivity_refined", len(u), worst, tolerance,
        notes=f"{len(pairs)} collisions at eps = {eps:g}: {int(crossing.sum())} refined to crossings, "
              f"{int((~crossing).sum())} tangential near contacts",
    )
