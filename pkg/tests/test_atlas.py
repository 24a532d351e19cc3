import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import config_for
from flatklein.atlas import (
    FigureConfig,
    Orientability,
    build_atlas,
    exceptional_sets,
    handedness_flips,
    orientability,
    phi,
    phi_wrapped,
)
from flatklein.crease import elbow
from flatklein.errors import ConfigurationError, DomainError

ATLASES = {n: build_atlas(config_for(n)) for n in (3, 4, 5, 6)}
unit = st.floats(0.0, 1.0)


def domain_point(atlas, a, b):
    dom = atlas.domain
    return dom.u_min + a * dom.width, dom.v_min + b * dom.height


@pytest.mark.parametrize("kwargs", [dict(n=2), dict(n=3, r=0.0), dict(n=4, s=2.0), dict(n=3, s=float("nan")),
                                    dict(n=3.5)])
def test_bad_configurations(kwargs):
    with pytest.raises(ConfigurationError):
        FigureConfig(**kwargs)


def test_default_configuration():
    cfg = FigureConfig()
    assert (cfg.n, cfg.r, cfg.s) == (3, 1.0, 2.0)
    assert cfg.tau == pytest.approx(1 / math.sqrt(3))
    assert cfg.klein


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_vertices_form_regular_polygon(n):
    atlas = ATLASES[n]
    v = atlas.vertices()
    edges = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=-1)
    np.testing.assert_allclose(edges, atlas.config.s, atol=1e-12)
    circum = atlas.config.s / (2 * math.sin(math.pi / n))
    np.testing.assert_allclose(np.linalg.norm(v - v.mean(axis=0), axis=-1), circum, atol=1e-12)
    assert atlas.closure_residual < 1e-12


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_axis_lines_join_consecutive_vertices(n):
    atlas = ATLASES[n]
    verts = atlas.vertices()
    for k, (p, d) in enumerate(atlas.axis_lines()):
        # tube k runs from vertex k-1 into vertex k
        np.testing.assert_allclose(p, verts[k], atol=1e-12)
        np.testing.assert_allclose(p - atlas.config.s * d, verts[k - 1], atol=1e-12)


@settings(max_examples=60)
@given(st.sampled_from([3, 4, 5, 6]), unit, unit)
def test_phi_matches_chained_elbows(n, a, b):
    atlas = ATLASES[n]
    dom = atlas.domain
    u, v = domain_point(atlas, a, b)
    k = int(dom.strip_of(v))
    local = elbow(atlas.config.elbow, dom.strip_sign(k) * u,
                  np.clip(v - dom.strip_center(k), -atlas.config.s / 2, atlas.config.s / 2))
    np.testing.assert_allclose(phi(atlas, u, v), atlas.motions[k].apply(local), atol=1e-12)


@settings(max_examples=60)
@given(st.sampled_from([3, 4, 5, 6]), unit, unit, unit, unit)
def test_phi_is_one_lipschitz_in_the_quotient(n, a, b, c, d):
    atlas = ATLASES[n]
    p = np.array(domain_point(atlas, a, b))
    q = np.array(domain_point(atlas, c, d))
    image = np.linalg.norm(phi(atlas, *p) - phi(atlas, *q))
    assert image <= atlas.domain.quotient_distance(p, q) + 1e-12


@settings(max_examples=60)
@given(st.sampled_from([3, 4, 5, 6]), st.floats(-30, 30), st.floats(-60, 60))
def test_wrapped_phi_respects_identifications(n, u, v):
    atlas = ATLASES[n]
    dom = atlas.domain
    base = phi_wrapped(atlas, u, v)
    np.testing.assert_allclose(phi_wrapped(atlas, u + dom.width, v), base, atol=1e-9)
    np.testing.assert_allclose(phi_wrapped(atlas, dom.flip * u, v + dom.height), base, atol=1e-9)


def test_phi_rejects_outside_points(atlas3):
    with pytest.raises(DomainError):
        phi(atlas3, 0.0, 100.0)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_orientability_by_parity(n):
    expected = Orientability.NON_ORIENTABLE if n % 2 else Orientability.ORIENTABLE
    assert orientability(config_for(n)) is expected
    assert handedness_flips(ATLASES[n]) == n


def test_handedness_path_must_avoid_inflections(atlas3):
    with pytest.raises(DomainError):
        handedness_flips(atlas3, 0.0)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_exceptional_sets(n):
    atlas = ATLASES[n]
    ex = exceptional_sets(atlas)
    assert len(ex.crease_curves) == n
    assert len(ex.inflection_points) == 2 * n
    assert len(ex.intersection_curves) == n
    for p in ex.inflection_points:
        assert p.dihedral == pytest.approx(math.pi, abs=1e-9)
        np.testing.assert_allclose(phi(atlas, *p.domain_uv), p.image_xyz, atol=1e-12)
    # crease image lies on both adjacent tubes
    u = np.linspace(atlas.domain.u_min, atlas.domain.u_max, 257)
    for k in range(n):
        pts = ex.image_of_crease(atlas, k, u)
        assert np.max(atlas.tube_distance_residual(pts)) < 1e-12


def test_inflection_images_lie_on_both_fold_ellipses(atlas3):
    # each inflection image is on the fold ellipse and on the pass-through ellipse
    ex = exceptional_sets(atlas3)
    lines = atlas3.axis_lines()
    for p in ex.inflection_points:
        xyz = np.array(p.image_xyz)
        k = p.strip
        for t in (k, (k + 1) % 3):
            base, d = lines[t]
            rel = xyz - base
            assert np.linalg.norm(rel - (rel @ d) * d) == pytest.approx(1.0, abs=1e-12)


def test_tube_of_assignment(atlas3):
    assert atlas3.tube_of(0, 0) == 0
    assert atlas3.tube_of(0, 1) == 1
    assert atlas3.tube_of(2, 1) == 0


def test_triangle_domain_layout(atlas3):
    dom = atlas3.domain
    assert (dom.v_min, dom.v_max) == (-1.0, 5.0)
    assert dom.strip_centers == [0.0, 2.0, 4.0]
    assert dom.strip_signs == [1.0, -1.0, 1.0]


def test_triangle_klein_gluing_pair(atlas3):
    assert np.linalg.norm(phi(atlas3, 0.3, -1.0) - phi(atlas3, -0.3, 5.0)) < 1e-9
    assert np.linalg.norm(phi(atlas3, 0.3, -1.0) - phi(atlas3, 0.3, 5.0)) > 0.1
