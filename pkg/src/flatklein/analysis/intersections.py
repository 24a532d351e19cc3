"""Pass-through curves where adjacent cylinders cut through one another.

Two equal-radius cylinders whose axes meet at a polygon vertex intersect in
two ellipses, one in each bisector plane of the axes.  The one in the miter
plane is the fold itself.  The other lies in the complementary bisector
plane; in the local frame of joint ``k`` it is ``y = -x / tau``, so its
pre-image on the incoming cylinder is the sine ``v' = -(r / tau) sin(u'/r)``.
Half of that ellipse lies on retained material of both tubes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from ..atlas import AtlasMap
from ..geometry import distance_to_line

INCOMING = "incoming"
OUTGOING = "outgoing"


@dataclass(frozen=True)
class DomainArc:
    """Arc ``v = offset + amplitude * sin(u / radius)`` for ``u in [u_start, u_end]``
    inside the domain rectangle."""

    u_start: float
    u_end: float
    offset: float
    amplitude: float
    radius: float

    def v(self, u):
        return self.offset + self.amplitude * np.sin(np.asarray(u, dtype=float) / self.radius)

    def sample(self, count: int = 256) -> np.ndarray:
        u = np.linspace(self.u_start, self.u_end, count)
        return np.stack([u, self.v(u)], axis=-1)


@dataclass(frozen=True)
class IntersectionCurve:
    """Pass-through ellipse of joint ``pair`` (tube ``pair`` meets tube ``pair+1``).

    ``image(t)`` parameterises the whole ellipse by the incoming cylinder's
    local angle ``t = u'`` in ``[-pi r, pi r]``; the retained semi-ellipse is
    ``t in [0, pi r]``.
    """

    atlas: AtlasMap
    pair: int
    vertex: np.ndarray
    plane_normal: np.ndarray
    fold_normal: np.ndarray
    slope: float
    incoming: tuple[DomainArc, ...]
    outgoing: tuple[DomainArc, ...]

    @property
    def r(self) -> float:
        return self.atlas.config.r

    @property
    def preimage_amplitude(self) -> float:
        return abs(self.slope) * self.r

    @property
    def retained(self) -> tuple[float, float]:
        return (0.0, math.pi * self.r)

    def local_preimage(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.stack([t, self.slope * self.r * np.sin(t / self.r)], axis=-1)

    def image(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        pre = self.local_preimage(t)
        dom = self.atlas.domain
        k = self.pair
        u = dom.strip_sign(k) * pre[..., 0]
        v = dom.strip_center(k) + pre[..., 1]
        return self.atlas.evaluate(u, v, k, 0)

    def sample_image(self, count: int = 2048, retained_only: bool = True) -> np.ndarray:
        lo, hi = self.retained if retained_only else (-math.pi * self.r, math.pi * self.r)
        return self.image(np.linspace(lo, hi, count))

    def arcs(self, side: str) -> tuple[DomainArc, ...]:
        if side == INCOMING:
            return self.incoming
        if side == OUTGOING:
            return self.outgoing
        raise ValueError(f"side must be {INCOMING!r} or {OUTGOING!r}")


def _material_bounds(atlas: AtlasMap, k: int, side: str):
    """Unwrapped creases bounding the tube that carries the chosen side."""
    cfg = atlas.config
    dom = atlas.domain
    amp = cfg.tau * cfg.r

    def crease(j):
        return lambda u: j * cfg.s + dom.strip_sign(j) * amp * np.sin(np.asarray(u) / cfg.r)

    if side == INCOMING:
        return crease(k - 1), crease(k)
    return crease(k), crease(k + 1)


def _retained_interval(fn_margin, lo: float, hi: float, samples: int = 4097):
    """Sub-intervals of ``[lo, hi]`` where ``fn_margin >= 0``."""
    u = np.linspace(lo, hi, samples)
    ok = fn_margin(u) >= -1e-12
    if ok.all():
        return [(lo, hi)]
    runs = []
    i = 0
    while i < samples:
        if not ok[i]:
            i += 1
            continue
        j = i
        while j + 1 < samples and ok[j + 1]:
            j += 1
        a = u[i] if i == 0 else brentq(fn_margin, u[i - 1], u[i])
        b = u[j] if j == samples - 1 else brentq(fn_margin, u[j], u[j + 1])
        if b > a:
            runs.append((a, b))
        i = j + 1
    return runs


def _wrap_arc(atlas: AtlasMap, lo: float, hi: float, offset: float, amp: float) -> list[DomainArc]:
    """Split an unwrapped sine arc at the horizontal domain edges and carry
    each piece into the rectangle through the identification."""
    dom = atlas.domain
    r = atlas.config.r
    cuts = {lo, hi}
    for edge in (dom.v_min, dom.v_max):
        if amp == 0.0:
            continue
        q = (edge - offset) / amp
        if abs(q) > 1.0:
            continue
        base = math.asin(q) * r
        for cand in (base, math.pi * r - base, -math.pi * r - base, base - 2 * math.pi * r, base + 2 * math.pi * r):
            if lo < cand < hi:
                cuts.add(cand)
    knots = sorted(cuts)
    out = []
    for a, b in zip(knots[:-1], knots[1:]):
        if b - a < 1e-14:
            continue
        mid = 0.5 * (a + b)
        vmid = offset + amp * math.sin(mid / r)
        m = math.floor((vmid - dom.v_min) / dom.height)
        new_offset = offset - m * dom.height
        if dom.klein and m % 2:
            out.append(DomainArc(-b, -a, new_offset, -amp, r))
        else:
            out.append(DomainArc(a, b, new_offset, amp, r))
    return out


def intersection_closed_form(atlas: AtlasMap, k: int) -> IntersectionCurve:
    cfg = atlas.config
    if not 0 <= k < cfg.n:
        raise ValueError(f"pair index {k} out of range for n={cfg.n}")
    dom = atlas.domain
    lines = atlas.axis_lines()
    a_in = lines[k][1]
    a_out = lines[(k + 1) % cfg.n][1]
    pass_normal = a_in + a_out
    pass_normal = pass_normal / np.linalg.norm(pass_normal)
    fold_normal = a_in - a_out
    fold_normal = fold_normal / np.linalg.norm(fold_normal)
    slope = -1.0 / cfg.tau
    sigma = dom.strip_sign(k)
    center = dom.strip_center(k)
    # unwrapped global pre-image: v = center + sigma * slope * r * sin(u / r)
    amp = sigma * slope * cfg.r
    pi_r = math.pi * cfg.r

    def arcs_for(side, local_lo, local_hi):
        lo, hi = sorted((sigma * local_lo, sigma * local_hi))
        below, above = _material_bounds(atlas, k, side)

        def margin(u):
            v = center + amp * np.sin(np.asarray(u) / cfg.r)
            return np.minimum(v - below(u), above(u) - v)

        pieces = []
        for a, b in _retained_interval(margin, lo, hi):
            pieces.extend(_wrap_arc(atlas, a, b, center, amp))
        return tuple(pieces)

    return IntersectionCurve(
        atlas=atlas,
        pair=k,
        vertex=lines[k][0],
        plane_normal=pass_normal,
        fold_normal=fold_normal,
        slope=slope,
        incoming=arcs_for(INCOMING, 0.0, pi_r),
        outgoing=arcs_for(OUTGOING, -pi_r, 0.0),
    )


@dataclass(frozen=True)
class OracleResult:
    points: np.ndarray
    params: np.ndarray

    def __len__(self) -> int:
        return len(self.points)


def cylinder_line_oracle(param, axis_point, axis_dir, r, u_grid, v_grid, tol=1e-10) -> OracleResult:
    """Brute-force locus on a parameterised surface at distance ``r`` from a line.

    ``param(u, v)`` evaluates the surface.  For every ``u`` on the grid the
    function ``dist(param(u, v), line) - r`` is sampled along ``v``; each sign
    change is refined by bisection until the bracket is narrower than ``tol``.
    """
    u_grid = np.asarray(u_grid, dtype=float)
    v_grid = np.asarray(v_grid, dtype=float)
    uu, vv = np.meshgrid(u_grid, v_grid, indexing="ij")

    def f(u, v):
        return distance_to_line(param(u, v), axis_point, axis_dir) - r

    vals = f(uu, vv)
    sign = np.sign(vals)
    crossing = (sign[:, :-1] * sign[:, 1:]) < 0
    exact = vals[:, :-1] == 0.0
    iu, iv = np.nonzero(crossing | exact)
    u = u_grid[iu]
    lo = v_grid[iv].copy()
    hi = v_grid[iv + 1].copy()
    flo = vals[iu, iv]
    while lo.size and np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        fm = f(u, mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
    v = 0.5 * (lo + hi)
    pts = param(u, v) if u.size else np.empty((0, 3))
    return OracleResult(np.asarray(pts).reshape(-1, 3), np.stack([u, v], axis=-1) if u.size else np.empty((0, 2)))


def intersection_oracle(atlas: AtlasMap, k: int, grid_n: int = 256, material_only: bool = False) -> OracleResult:
    """Sample tube ``k`` near joint ``k`` and bisect for points at distance
    ``r`` from the axis of tube ``k + 1``.  Finds both ellipses."""
    if grid_n < 64:
        raise ValueError("grid_n must be at least 64")
    cfg = atlas.config
    dom = atlas.domain
    lines = atlas.axis_lines()
    base, direction = lines[(k + 1) % cfg.n]
    sigma = dom.strip_sign(k)
    center = dom.strip_center(k)
    reach = 1.05 * cfg.r * max(cfg.tau, 1.0 / cfg.tau)
    # offset grids so that the exact tangency points are not grid nodes
    u_grid = np.linspace(-math.pi * cfg.r, math.pi * cfg.r, grid_n, endpoint=False) + math.pi * cfg.r / grid_n
    v_grid = np.linspace(-reach, reach, grid_n) + 0.37 * reach / grid_n

    def param(u, v):
        return atlas.evaluate(sigma * u, center + v, k, 0)

    res = cylinder_line_oracle(param, base, direction, cfg.r, u_grid, v_grid)
    if material_only and len(res):
        below, above = _material_bounds(atlas, k, INCOMING)
        ug = sigma * res.params[:, 0]
        vg = center + res.params[:, 1]
        keep = (vg >= below(ug) - 1e-12) & (vg <= above(ug) + 1e-12)
        res = OracleResult(res.points[keep], res.params[keep])
    return res


def split_by_plane(points, vertex, fold_normal, pass_normal):
    """Label each point 0 (fold ellipse) or 1 (pass-through ellipse) by the
    smaller carrier-plane residual."""
    rel = np.asarray(points, dtype=float) - vertex
    return (np.abs(rel @ pass_normal) < np.abs(rel @ fold_normal)).astype(int)


def distance_to_curve(points, curve_fn, t_lo, t_hi, dense: int = 20001, iters: int = 80) -> np.ndarray:
    """Distance from points to the curve ``curve_fn(t)``, ``t in [t_lo, t_hi]``:
    dense nearest sample followed by vectorised golden-section refinement."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(pts) == 0:
        return np.empty(0)
    ts = np.linspace(t_lo, t_hi, dense)
    samples = curve_fn(ts)
    _, idx = cKDTree(samples).query(pts)
    step = ts[1] - ts[0]
    a = np.clip(ts[idx] - step, t_lo, t_hi)
    b = np.clip(ts[idx] + step, t_lo, t_hi)
    g = (math.sqrt(5.0) - 1.0) / 2.0

    def d2(t):
        return np.sum((curve_fn(t) - pts) ** 2, axis=-1)

    for _ in range(iters):
        c = b - g * (b - a)
        d = a + g * (b - a)
        left = d2(c) < d2(d)
        b = np.where(left, d, b)
        a = np.where(left, a, c)
    best = d2(0.5 * (a + b))
    return np.sqrt(best)


def hausdorff_to_curve(points, curve: IntersectionCurve, retained_only: bool = False) -> float:
    """One-sided Hausdorff distance from ``points`` to the closed-form ellipse."""
    lo, hi = curve.retained if retained_only else (-math.pi * curve.r, math.pi * curve.r)
    dist = distance_to_curve(points, curve.image, lo, hi)
    return float(dist.max()) if dist.size else 0.0
