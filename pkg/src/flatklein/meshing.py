"""Crease-aligned triangulation of the flat domain and its image.

Every feature line of the domain (the rectangle edges, strip boundaries,
creases and slit pre-images) is a graph ``v = offset + A sin(u / r)`` over
part of the ``u`` range.  The mesh is built column by column: each column
``u = const`` carries a node on every feature line it meets plus evenly
spaced fill nodes, and neighbouring columns are zipped together band by
band.  Feature lines therefore run along mesh edges, and two of them can
only meet at a column, where their nodes merge.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .analysis.intersections import INCOMING, OUTGOING, IntersectionCurve
from .atlas import AtlasMap
from .errors import ConfigurationError, MeshError, PolicyError

MIN_RES_U = 16
MIN_RES_V = 8

EDGE_INTERIOR = 0
EDGE_BOUNDARY = 1
EDGE_CREASE = 2
EDGE_CUT = 3
EDGE_FLAG_NAMES = {EDGE_INTERIOR: "interior", EDGE_BOUNDARY: "boundary", EDGE_CREASE: "crease", EDGE_CUT: "cut"}

ALTERNATE = "alternate"
DEFAULT_POLICY = INCOMING


@dataclass(frozen=True)
class FeatureCurve:
    """``v = offset + amplitude * sin(u / radius)`` for ``u in [u_lo, u_hi]``."""

    kind: str
    index: int
    offset: float
    amplitude: float
    radius: float
    u_lo: float
    u_hi: float

    def v(self, u):
        return self.offset + self.amplitude * np.sin(np.asarray(u, dtype=float) / self.radius)

    def active(self, u: float, tol: float) -> bool:
        return self.u_lo - tol <= u <= self.u_hi + tol


def _crossings(a: FeatureCurve, b: FeatureCurve, tol: float) -> list[float]:
    """Parameters where two feature graphs meet, inside both ranges."""
    da = a.amplitude - b.amplitude
    do = a.offset - b.offset
    if abs(da) < 1e-15:
        return []
    q = -do / da
    if abs(q) > 1.0:
        return []
    r = a.radius
    t0 = math.asin(q)
    out = []
    for t in (t0, math.pi - t0, -math.pi - t0, t0 - 2 * math.pi, t0 + 2 * math.pi):
        u = r * t
        lo = max(a.u_lo, b.u_lo) - tol
        hi = min(a.u_hi, b.u_hi) + tol
        if lo <= u <= hi:
            out.append(u)
    return out


@dataclass
class _Node:
    v: float
    curves: set
    fill: bool


@dataclass
class SurfaceMesh:
    """Indexed triangle mesh of the image with its domain coordinates.

    ``uvs`` are physical domain coordinates.  ``origin[i]`` is the vertex
    that ``i`` was duplicated from when slits were opened (itself otherwise).
    """

    vertices: np.ndarray
    uvs: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    edge_flags: np.ndarray
    strip: np.ndarray
    upper: np.ndarray
    origin: np.ndarray
    metadata: dict = field(default_factory=dict)
    atlas: AtlasMap | None = field(default=None, repr=False, compare=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def edges_with(self, flag: int) -> np.ndarray:
        return self.edges[self.edge_flags == flag]


@dataclass(frozen=True)
class MeshQuality:
    max_distortion: float
    series: tuple[float, ...] = ()
    resolutions: tuple[tuple[int, int], ...] = ()

    @property
    def ratios(self) -> tuple[float, ...]:
        s = self.series
        return tuple(s[i] / s[i + 1] for i in range(len(s) - 1))


# -- feature lines ------------------------------------------------------------

def _base_curves(atlas: AtlasMap):
    """Rectangle edges, strip boundaries and creases, bottom to top, with the
    fill count of each band between consecutive lines."""
    cfg = atlas.config
    dom = atlas.domain
    r = cfg.r
    lo, hi = dom.u_min, dom.u_max
    curves = [FeatureCurve("edge", 0, dom.v_min, 0.0, r, lo, hi)]
    for k in range(cfg.n):
        curves.append(FeatureCurve("crease", k, dom.strip_center(k), dom.strip_sign(k) * cfg.tau * r, r, lo, hi))
        if k < cfg.n - 1:
            curves.append(FeatureCurve("boundary", k + 1, dom.strip_center(k) + 0.5 * cfg.s, 0.0, r, lo, hi))
    curves.append(FeatureCurve("edge", 1, dom.v_max, 0.0, r, lo, hi))
    return curves


def _slit_curves(arcs, start: int) -> list[FeatureCurve]:
    return [
        FeatureCurve("slit", start + i, a.offset, a.amplitude, a.radius, a.u_start, a.u_end)
        for i, a in enumerate(arcs)
    ]


def _columns(atlas: AtlasMap, res_u: int, curves: list[FeatureCurve], slits: list[FeatureCurve], tol: float):
    dom = atlas.domain
    base = np.linspace(dom.u_min, dom.u_max, res_u + 1)
    if not slits:
        return base
    events = set()
    for i, s in enumerate(slits):
        events.update((s.u_lo, s.u_hi))
        for other in curves + slits[i + 1:]:
            events.update(_crossings(s, other, tol))
    if dom.klein:
        events |= {-e for e in events}
    du = dom.width / res_u
    cols = list(base)
    snapped = set()
    extra = []
    for e in sorted(events):
        if e <= dom.u_min + tol or e >= dom.u_max - tol:
            continue
        j = int(round((e - dom.u_min) / du))
        if 0 < j < res_u and j not in snapped and abs(e - base[j]) < 0.25 * du:
            cols[j] = e
            snapped.add(j)
        else:
            extra.append(e)
    cols = np.array(sorted(cols + extra))
    keep = np.concatenate([[True], np.diff(cols) > tol])
    return cols[keep]


def _column_nodes(u: float, base: list[FeatureCurve], counts: list[int], slits: list[FeatureCurve], tol: float):
    vals = [float(c.v(u)) for c in base]
    nodes = [_Node(vals[0], {0}, False)]
    for b, cnt in enumerate(counts):
        lo, hi = vals[b], vals[b + 1]
        for j in range(1, cnt):
            nodes.append(_Node(lo + (hi - lo) * j / cnt, set(), True))
        nodes.append(_Node(hi, {b + 1}, False))
    for s in slits:
        if not s.active(u, tol):
            continue
        cid = len(base) + s.index
        val = float(s.v(u))
        keys = [nd.v for nd in nodes]
        idx = bisect.bisect_left(keys, val)
        near = [i for i in (idx - 1, idx) if 0 <= i < len(nodes)]
        hit = [i for i in near if abs(nodes[i].v - val) <= tol]
        if hit:
            nd = nodes[hit[0]]
            if nd.fill:
                nd.v, nd.fill = val, False
            nd.curves.add(cid)
            continue
        fills = sorted((abs(nodes[i].v - val), i) for i in near if nodes[i].fill)
        if fills:
            nd = nodes[fills[0][1]]
            nd.v, nd.fill = val, False
            nd.curves.add(cid)
        else:
            nodes.insert(idx, _Node(val, {cid}, False))
    return nodes


def _zip(left, right, uvs, pos, tris):
    """Triangulate the band between two node chains (bottom to top)."""
    a = b = 0
    nl, nr = len(left), len(right)

    def deficit(i, j):
        return np.linalg.norm(uvs[i] - uvs[j]) - np.linalg.norm(pos[i] - pos[j])

    while a < nl - 1 or b < nr - 1:
        if a == nl - 1:
            go_right = True
        elif b == nr - 1:
            go_right = False
        else:
            go_right = deficit(left[a], right[b + 1]) <= deficit(left[a + 1], right[b])
        if go_right:
            tris.append((left[a], right[b], right[b + 1]))
            b += 1
        else:
            tris.append((left[a], right[b], left[a + 1]))
            a += 1


def _edge_table(tris: np.ndarray):
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e = np.sort(e, axis=1)
    edges, counts = np.unique(e, axis=0, return_counts=True)
    return edges, counts


def _build(atlas: AtlasMap, res_u: int, res_v: int, slits: list[FeatureCurve]):
    cfg = atlas.config
    tol = 1e-9 * cfg.r
    base = _base_curves(atlas)
    jc = res_v // 2
    counts = [jc if i % 2 == 0 else res_v - jc for i in range(len(base) - 1)]
    cols = _columns(atlas, res_u, base, slits, tol)

    uv_list = []
    column_ids = []
    column_curves = []
    for u in cols:
        nodes = _column_nodes(float(u), base, counts, slits, tol)
        start = len(uv_list)
        ids = list(range(start, start + len(nodes)))
        uv_list.extend((float(u), nd.v) for nd in nodes)
        column_ids.append(ids)
        column_curves.append({c: i for i, nd in zip(ids, nodes) for c in nd.curves})
    uvs = np.array(uv_list)
    strip, upper = atlas.locate(uvs[:, 0], uvs[:, 1])
    pos = atlas.evaluate(uvs[:, 0], uvs[:, 1], strip, upper)

    all_curves = base + slits
    tris: list[tuple[int, int, int]] = []
    crease_edges, cut_edges = set(), set()
    for i in range(len(cols) - 1):
        ul, ur = float(cols[i]), float(cols[i + 1])
        mid = 0.5 * (ul + ur)
        live = [c for c in range(len(all_curves)) if c < len(base) or
                (all_curves[c].active(ul, tol) and all_curves[c].active(ur, tol))]
        live.sort(key=lambda c: float(all_curves[c].v(mid)))
        lmap, rmap = column_curves[i], column_curves[i + 1]
        lpos = {vid: j for j, vid in enumerate(column_ids[i])}
        rpos = {vid: j for j, vid in enumerate(column_ids[i + 1])}
        for c in live:
            pair = tuple(sorted((lmap[c], rmap[c])))
            kind = all_curves[c].kind
            if kind == "crease":
                crease_edges.add(pair)
            elif kind == "slit":
                cut_edges.add(pair)
        for c_lo, c_hi in zip(live[:-1], live[1:]):
            a0, a1 = lpos[lmap[c_lo]], lpos[lmap[c_hi]]
            b0, b1 = rpos[rmap[c_lo]], rpos[rmap[c_hi]]
            if a1 < a0 or b1 < b0:
                raise MeshError(f"feature lines cross between columns at u in [{ul:.6g}, {ur:.6g}]")
            _zip(column_ids[i][a0:a1 + 1], column_ids[i + 1][b0:b1 + 1], uvs, pos, tris)
    tri = np.array(tris, dtype=np.int64)
    # drop zero-area triangles left where two feature lines meet at a column
    area = _uv_area(uvs, tri)
    tri = tri[area > 1e-14 * cfg.r * cfg.r]
    return uvs, pos, strip, upper, tri, crease_edges, cut_edges, cols


def _uv_area(uvs, tri):
    a, b, c = uvs[tri[:, 0]], uvs[tri[:, 1]], uvs[tri[:, 2]]
    return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def _open_cuts(tri: np.ndarray, n_vertices: int, cut_edges: set):
    """Duplicate vertices along cut edges so each side of a cut gets its own
    copy.  Returns new triangles and the origin of every vertex."""
    tri = tri.copy()
    origin = list(range(n_vertices))
    cut_vertices = sorted({v for e in cut_edges for v in e})
    incident: dict[int, list[int]] = {v: [] for v in cut_vertices}
    for t, (a, b, c) in enumerate(tri):
        for v in (a, b, c):
            if v in incident:
                incident[v].append(t)
    for v in cut_vertices:
        faces = incident[v]
        ds = DisjointSet(faces)
        by_edge: dict[int, list[int]] = {}
        for t in faces:
            for w in tri[t]:
                if w != v:
                    by_edge.setdefault(int(w), []).append(t)
        for w, ts in by_edge.items():
            if tuple(sorted((origin[v], origin[w]))) in cut_edges:
                continue
            for t in ts[1:]:
                ds.merge(ts[0], t)
        groups = sorted(ds.subsets(), key=min)
        for g in groups[1:]:
            new = len(origin)
            origin.append(origin[v])
            for t in g:
                tri[t][tri[t] == v] = new
    return tri, np.array(origin, dtype=np.int64)


def _assemble(atlas, uvs, pos, strip, upper, tri, crease_edges, cut_edges, metadata) -> SurfaceMesh:
    if cut_edges:
        tri, origin = _open_cuts(tri, len(uvs), cut_edges)
        uvs, pos, strip, upper = uvs[origin], pos[origin], strip[origin], upper[origin]
    else:
        origin = np.arange(len(uvs), dtype=np.int64)
    edges, counts = _edge_table(tri)
    flags = np.full(len(edges), EDGE_INTERIOR, dtype=np.uint8)
    flags[counts == 1] = EDGE_BOUNDARY
    oe = np.sort(origin[edges], axis=1)
    for i, (a, b) in enumerate(oe):
        key = (int(a), int(b))
        if key in cut_edges:
            flags[i] = EDGE_CUT
        elif key in crease_edges:
            flags[i] = EDGE_CREASE
    return SurfaceMesh(pos, uvs, tri, edges, flags, strip, upper, origin, metadata, atlas)


def tessellate(atlas: AtlasMap, res_u: int = 64, res_v_per_strip: int = 16) -> SurfaceMesh:
    """Triangulate the whole domain with one row of every strip on its crease.

    ``res_u`` columns span the width and each strip gets ``res_v_per_strip``
    rows, half below the crease and half above; strip boundary rows are
    shared, so there are ``(res_u + 1) * (n * res_v_per_strip + 1)`` vertices.
    """
    if int(res_u) < MIN_RES_U or int(res_v_per_strip) < MIN_RES_V:
        raise ConfigurationError(
            f"resolution {res_u}x{res_v_per_strip} below minimum {MIN_RES_U}x{MIN_RES_V}"
        )
    res_u, res_v = int(res_u), int(res_v_per_strip)
    uvs, pos, strip, upper, tri, crease_edges, _, cols = _build(atlas, res_u, res_v, [])
    meta = {"n": atlas.config.n, "r": atlas.config.r, "s": atlas.config.s,
            "res_u": res_u, "res_v_per_strip": res_v, "columns": len(cols), "slits": 0}
    return _assemble(atlas, uvs, pos, strip, upper, tri, crease_edges, set(), meta)


def slit_sides(n: int, policy=None) -> tuple[str, ...]:
    """Which tube is cut at each joint.

    ``policy`` is ``"incoming"`` (tube ``k`` at joint ``k``), ``"outgoing"``
    (tube ``k + 1``), ``"alternate"`` (incoming at even joints, outgoing at
    odd ones) or an explicit sequence of ``n`` sides.
    """
    if policy is None:
        policy = DEFAULT_POLICY
    if isinstance(policy, str):
        if policy in (INCOMING, OUTGOING):
            return (policy,) * n
        if policy == ALTERNATE:
            return tuple(INCOMING if k % 2 == 0 else OUTGOING for k in range(n))
        raise PolicyError(f"unknown slit policy {policy!r}")
    sides = tuple(policy)
    if len(sides) != n or any(s not in (INCOMING, OUTGOING) for s in sides):
        raise PolicyError(f"slit policy must list {n} sides from ({INCOMING!r}, {OUTGOING!r}), got {sides!r}")
    return sides


def cut_slits(mesh: SurfaceMesh, curves: list[IntersectionCurve], which_side=None) -> SurfaceMesh:
    """Re-triangulate with the chosen pass-through arcs as feature lines and
    open them into slits."""
    atlas = mesh.atlas
    if atlas is None:
        raise MeshError("mesh carries no atlas; build it with tessellate")
    n = atlas.config.n
    sides = slit_sides(n, which_side)
    arcs = []
    tubes = []
    for curve in curves:
        side = sides[curve.pair]
        chosen = curve.arcs(side)
        if not chosen:
            raise PolicyError(f"pass-through curve {curve.pair} does not meet the {side} tube's material")
        arcs.extend(chosen)
        tubes.append(curve.pair if side == INCOMING else (curve.pair + 1) % n)
    res_u = mesh.metadata["res_u"]
    res_v = mesh.metadata["res_v_per_strip"]
    slits = _slit_curves(arcs, 0)
    uvs, pos, strip, upper, tri, crease_edges, cut_edges, cols = _build(atlas, res_u, res_v, slits)
    policy = which_side if isinstance(which_side, str) or which_side is None else "explicit"
    meta = dict(mesh.metadata)
    meta.update({
        "columns": len(cols),
        "slits": len(curves),
        "slit_arcs": len(arcs),
        "slit_policy": policy or DEFAULT_POLICY,
        "slit_sides": list(sides),
        "slit_tubes": tubes,
    })
    return _assemble(atlas, uvs, pos, strip, upper, tri, crease_edges, cut_edges, meta)


# -- quality and topology -------------------------------------------------------

def distortion(mesh: SurfaceMesh) -> MeshQuality:
    """Worst relative edge-length change between the domain and the image."""
    e = mesh.edges
    luv = np.linalg.norm(mesh.uvs[e[:, 0]] - mesh.uvs[e[:, 1]], axis=1)
    if np.any(luv <= 1e-14):
        raise MeshError("degenerate edge: zero length in the domain")
    l3 = np.linalg.norm(mesh.vertices[e[:, 0]] - mesh.vertices[e[:, 1]], axis=1)
    worst = float(np.max(np.abs(l3 - luv) / luv))
    return MeshQuality(worst, (worst,))


def distortion_series(atlas: AtlasMap, levels=((64, 16), (128, 32), (256, 64))) -> MeshQuality:
    values = tuple(distortion(tessellate(atlas, ru, rv)).max_distortion for ru, rv in levels)
    return MeshQuality(values[-1], values, tuple(tuple(x) for x in levels))


def crease_straddles(mesh: SurfaceMesh, tol: float = 1e-12) -> int:
    """Number of triangles with vertices strictly on both sides of a crease."""
    atlas = mesh.atlas
    dom = atlas.domain
    u = mesh.uvs[mesh.triangles, 0]
    v = mesh.uvs[mesh.triangles, 1]
    bad = np.zeros(len(mesh.triangles), dtype=bool)
    for k in range(atlas.config.n):
        d = v - dom.crease_v(k, u)
        bad |= np.any(d > tol, axis=1) & np.any(d < -tol, axis=1)
    return int(bad.sum())


@dataclass(frozen=True)
class QuotientTopology:
    vertices: int
    edges: int
    faces: int
    closed: bool
    orientable: bool
    components: int
    manifold: bool

    @property
    def euler(self) -> int:
        return self.vertices - self.edges + self.faces


def _glue(mesh: SurfaceMesh, tol: float) -> np.ndarray:
    """Quotient label of every vertex.

    Boundary edges on opposite seams are paired by their midpoints, and
    their endpoints glued pairwise.  Working with edges rather than vertices
    keeps the two copies of a vertex on a slit that reaches a seam apart.
    """
    dom = mesh.atlas.domain
    uv = mesh.uvs
    edges = mesh.edges[mesh.edge_flags == EDGE_BOUNDARY]
    ds = DisjointSet(range(mesh.n_vertices))

    def on(coord, value):
        return np.all(np.abs(uv[edges, coord] - value) <= tol, axis=1)

    def pair(src, dst, to_src):
        if len(src) == 0 and len(dst) == 0:
            return
        if len(src) != len(dst):
            raise MeshError(f"seam edge counts differ: {len(src)} vs {len(dst)}")
        dst_ends = to_src(uv[dst].reshape(-1, 2)).reshape(-1, 2, 2)
        dist, idx = cKDTree(dst_ends.mean(axis=1)).query(uv[src].mean(axis=1))
        if np.any(dist > tol):
            raise MeshError("seam edge without a partner across the identification")
        for e_src, j in zip(src, idx):
            for end in e_src:
                k = np.argmin(np.linalg.norm(dst_ends[j] - uv[end], axis=1))
                ds.merge(int(end), int(dst[j][k]))

    pair(edges[on(0, dom.u_min)], edges[on(0, dom.u_max)],
         lambda p: p - np.array([dom.width, 0.0]))
    pair(edges[on(1, dom.v_min)], edges[on(1, dom.v_max)],
         lambda p: p * np.array([dom.flip, 1.0]) - np.array([0.0, dom.height]))
    rep = np.array([ds[i] for i in range(mesh.n_vertices)])
    _, labels = np.unique(rep, return_inverse=True)
    return labels


def quotient_topology(mesh: SurfaceMesh, tol: float | None = None) -> QuotientTopology:
    """Topology of the mesh with the edge identifications applied."""
    if tol is None:
        tol = 1e-9 * mesh.atlas.config.r
    labels = _glue(mesh, tol)
    tri = labels[mesh.triangles]
    if np.any((tri[:, 0] == tri[:, 1]) | (tri[:, 1] == tri[:, 2]) | (tri[:, 2] == tri[:, 0])):
        raise MeshError("triangle collapses under the identification")
    directed = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    face_of = np.tile(np.arange(len(tri)), 3)
    keys = np.sort(directed, axis=1)
    edges, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    manifold = bool(np.all(counts <= 2))
    closed = bool(np.all(counts == 2))
    # build face adjacency and propagate orientation
    forward = directed[:, 0] == keys[:, 0]
    order = np.argsort(inverse, kind="stable")
    inv_sorted = inverse[order]
    pairs_a, pairs_b, same = [], [], []
    starts = np.searchsorted(inv_sorted, np.arange(len(edges)))
    for e in np.nonzero(counts == 2)[0]:
        i, j = order[starts[e]], order[starts[e] + 1]
        pairs_a.append(face_of[i])
        pairs_b.append(face_of[j])
        same.append(forward[i] == forward[j])
    nf = len(tri)
    adj = coo_matrix((np.ones(len(pairs_a)), (pairs_a, pairs_b)), shape=(nf, nf))
    ncomp, comp = connected_components(adj, directed=False)
    neighbours: list[list[tuple[int, bool]]] = [[] for _ in range(nf)]
    for a, b, sm in zip(pairs_a, pairs_b, same):
        neighbours[a].append((b, sm))
        neighbours[b].append((a, sm))
    sign = np.zeros(nf, dtype=np.int8)
    orientable = True
    for seed in range(nf):
        if sign[seed]:
            continue
        sign[seed] = 1
        stack = [seed]
        while stack:
            f = stack.pop()
            for g, sm in neighbours[f]:
                # faces agree when they traverse the shared edge in opposite directions
                want = -sign[f] if sm else sign[f]
                if sign[g] == 0:
                    sign[g] = want
                    stack.append(g)
                elif sign[g] != want:
                    orientable = False
    used = np.unique(tri)
    return QuotientTopology(len(used), len(edges), nf, closed, orientable, int(ncomp), manifold)


def rectangle_components(mesh: SurfaceMesh) -> int:
    """Connected pieces of the cut-open rectangle (no identifications)."""
    n = mesh.n_vertices
    t = mesh.triangles
    rows = np.concatenate([t[:, 0], t[:, 1], t[:, 2]])
    cols = np.concatenate([t[:, 1], t[:, 2], t[:, 0]])
    adj = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(adj, directed=False)
    return len(np.unique(labels[np.unique(t)]))
