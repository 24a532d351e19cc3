import math

import numpy as np
import pytest

from conftest import config_for
from flatklein.analysis.intersections import intersection_closed_form
from flatklein.atlas import build_atlas, exceptional_sets, phi
from flatklein.errors import ConfigurationError, MeshError, PolicyError
from flatklein.meshing import (
    ALTERNATE,
    EDGE_CREASE,
    EDGE_CUT,
    crease_straddles,
    cut_slits,
    distortion,
    distortion_series,
    quotient_topology,
    rectangle_components,
    slit_sides,
    tessellate,
)

ATLASES = {n: build_atlas(config_for(n)) for n in (3, 4, 5, 6)}


def curves_of(atlas):
    return [intersection_closed_form(atlas, k) for k in range(atlas.config.n)]


@pytest.fixture(scope="module", params=[3, 4, 5, 6])
def mesh_n(request):
    return tessellate(ATLASES[request.param], 32, 8)


@pytest.fixture(scope="module")
def slit3():
    atlas = ATLASES[3]
    return cut_slits(tessellate(atlas, 64, 16), curves_of(atlas))


def test_vertex_count(mesh_n):
    n = mesh_n.metadata["n"]
    assert mesh_n.n_vertices == 33 * (n * 8 + 1)


def test_vertices_are_exact_samples(mesh_n):
    u, v = mesh_n.uvs.T
    np.testing.assert_allclose(mesh_n.vertices, phi(mesh_n.atlas, u, v), atol=1e-12)


def test_no_crease_straddles(mesh_n):
    assert crease_straddles(mesh_n) == 0


def test_crease_edges_lie_on_creases(mesh_n):
    dom = mesh_n.atlas.domain
    e = mesh_n.edges_with(EDGE_CREASE)
    assert len(e)
    uv = mesh_n.uvs[e]
    best = np.min([np.abs(uv[..., 1] - dom.crease_v(k, uv[..., 0])) for k in range(dom.n)], axis=0)
    assert np.max(best) < 1e-12


def test_triangles_counterclockwise(mesh_n):
    a, b, c = (mesh_n.uvs[mesh_n.triangles[:, i]] for i in range(3))
    cross = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    assert np.all(cross > 0)


def test_uv_area_covers_rectangle(mesh_n):
    a, b, c = (mesh_n.uvs[mesh_n.triangles[:, i]] for i in range(3))
    area = 0.5 * np.sum((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    dom = mesh_n.atlas.domain
    assert area == pytest.approx(dom.width * dom.height, rel=1e-12)


def test_quotient_is_closed_surface(mesh_n):
    topo = quotient_topology(mesh_n)
    n = mesh_n.metadata["n"]
    assert topo.euler == 0
    assert topo.closed and topo.manifold
    assert topo.components == 1
    assert topo.orientable == (n % 2 == 0)


def test_distortion_converges_quadratically():
    q = distortion_series(ATLASES[3])
    assert q.max_distortion < 1e-3
    assert all(r >= 3.5 for r in q.ratios)


def test_resolution_minimum():
    with pytest.raises(ConfigurationError):
        tessellate(ATLASES[3], 8, 16)
    with pytest.raises(ConfigurationError):
        tessellate(ATLASES[3], 64, 4)


def test_slit_sides_policies():
    assert slit_sides(3) == ("incoming",) * 3
    assert slit_sides(4, ALTERNATE) == ("incoming", "outgoing", "incoming", "outgoing")
    assert slit_sides(2, ["outgoing", "incoming"]) == ("outgoing", "incoming")
    with pytest.raises(PolicyError):
        slit_sides(3, "both")
    with pytest.raises(PolicyError):
        slit_sides(3, ["incoming"])


def test_slit_mesh_metadata_and_topology(slit3):
    assert slit3.metadata["slits"] == 3
    assert slit3.metadata["slit_tubes"] == [0, 1, 2]
    assert len(slit3.edges_with(EDGE_CUT)) > 0
    assert crease_straddles(slit3) == 0
    assert distortion(slit3).max_distortion < 1e-3
    topo = quotient_topology(slit3)
    assert topo.components == 1
    # each slit is a disc removed from the closed surface
    assert topo.euler == -3
    assert not topo.closed


def test_slit_vertices_are_duplicated(slit3):
    dup = slit3.origin != np.arange(slit3.n_vertices)
    assert dup.any()
    np.testing.assert_allclose(slit3.vertices[dup], slit3.vertices[slit3.origin[dup]], atol=1e-15)


def test_slits_end_at_inflection_images(atlas3):
    # the retained pass-through arcs end where the tubes are tangent
    targets = np.array([p.image_xyz for p in exceptional_sets(atlas3).inflection_points])
    dom = atlas3.domain
    for curve in curves_of(atlas3):
        for arc in curve.incoming:
            for u in (arc.u_start, arc.u_end):
                v = float(arc.v(u))
                if abs(v - dom.v_min) < 1e-9 or abs(v - dom.v_max) < 1e-9:
                    continue
                p = phi(atlas3, u, v)
                assert np.min(np.linalg.norm(targets - p, axis=1)) < 1e-9


@pytest.mark.parametrize("n", [4, 5])
def test_slits_other_polygons(n):
    atlas = ATLASES[n]
    mesh = cut_slits(tessellate(atlas, 64, 16), curves_of(atlas))
    topo = quotient_topology(mesh)
    assert topo.euler == -n
    assert topo.components == 1
    assert crease_straddles(mesh) == 0


def test_alternate_policy_detaches_lens():
    atlas = ATLASES[3]
    mesh = cut_slits(tessellate(atlas, 64, 16), curves_of(atlas), ALTERNATE)
    assert quotient_topology(mesh).components == 2
    assert rectangle_components(mesh) >= 2


def test_cut_slits_needs_atlas(slit3):
    import dataclasses
    bare = dataclasses.replace(slit3, atlas=None)
    with pytest.raises(MeshError):
        cut_slits(bare, curves_of(ATLASES[3]))
