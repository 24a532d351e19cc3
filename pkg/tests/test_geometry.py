import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatklein.errors import DomainError
from flatklein.geometry import (
    PlaneThroughOrigin,
    RigidMotion,
    SineCurve,
    compose,
    distance_to_line,
    miter_turn_angle,
    planar_curvature,
    reflect,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
points = st.tuples(finite, finite, finite).map(np.array)
slopes = st.floats(0.05, 20.0)


def test_reflect_known_examples():
    plane = PlaneThroughOrigin.from_slope(1.0)
    np.testing.assert_allclose(reflect(plane, [1.0, 0.0, 0.0]), [0.0, 1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(reflect(plane, [0.0, 0.0, 2.0]), [0.0, 0.0, 2.0], atol=1e-15)
    # mirror line at 60 degrees sends the y-axis to 30 degrees
    plane = PlaneThroughOrigin.from_slope(math.sqrt(3.0))
    np.testing.assert_allclose(reflect(plane, [0.0, 1.0, 0.0]), [math.sqrt(3) / 2, 0.5, 0.0], atol=1e-15)


def test_plane_rejects_zero_normal():
    with pytest.raises(ValueError):
        PlaneThroughOrigin(np.zeros(3))


@given(points, slopes)
def test_reflection_is_involutive_isometry(p, tau):
    plane = PlaneThroughOrigin.from_slope(tau)
    q = reflect(plane, p)
    scale = 1.0 + np.linalg.norm(p)
    assert np.linalg.norm(reflect(plane, q) - p) <= 1e-13 * scale
    assert abs(np.linalg.norm(q) - np.linalg.norm(p)) <= 1e-13 * scale
    assert abs(plane.signed_distance(q) + plane.signed_distance(p)) <= 1e-13 * scale


@given(st.floats(0.0, math.pi), st.floats(0.0, math.pi))
def test_two_reflections_rotate_by_twice_the_angle(a, b):
    # planes through the z-axis at angles a and b compose to a rotation by 2(b - a)
    pa = PlaneThroughOrigin(np.array([-math.sin(a), math.cos(a), 0.0]))
    pb = PlaneThroughOrigin(np.array([-math.sin(b), math.cos(b), 0.0]))
    m = compose(RigidMotion.reflection(pb), RigidMotion.reflection(pa))
    rot = RigidMotion.rotation([0.0, 0.0, 1.0], 2.0 * (b - a))
    np.testing.assert_allclose(m.linear, rot.linear, atol=1e-14)
    assert m.proper


@given(st.lists(st.tuples(points, st.floats(-math.pi, math.pi), points), min_size=1, max_size=6), points)
def test_composition_matches_sequential_application(steps, p):
    total = RigidMotion.identity()
    q = p.copy()
    for axis, angle, t in steps:
        if np.linalg.norm(axis) < 1e-6:
            continue
        m = compose(RigidMotion.translation_by(t), RigidMotion.rotation(axis, angle))
        total = compose(m, total)
        q = m.apply(q)
    scale = 1.0 + np.linalg.norm(q) + sum(np.linalg.norm(s[2]) for s in steps)
    assert np.linalg.norm(total.apply(p) - q) <= 1e-11 * scale
    assert np.linalg.norm(total.inverse().apply(q) - p) <= 1e-11 * scale


def test_long_chain_stays_orthogonal():
    rng = np.random.default_rng(7)
    total = RigidMotion.identity()
    for _ in range(1000):
        plane = PlaneThroughOrigin(rng.normal(size=3))
        total = compose(RigidMotion.reflection(plane), total)
        total = compose(RigidMotion.translation_by(rng.normal(size=3)), total)
    assert total.orthogonality_defect < 1e-9
    assert abs(abs(np.linalg.det(total.linear)) - 1.0) < 1e-9


def test_sine_curve_curvature_matches_finite_differences():
    curve = SineCurve(amplitude=0.7, radius=1.3, u_min=-4.0, u_max=4.0)
    u = np.linspace(-3.9, 3.9, 41)
    h = 1e-3
    g = curve.g
    d1 = (g(u - 2 * h) - 8 * g(u - h) + 8 * g(u + h) - g(u + 2 * h)) / (12 * h)
    d2 = (-g(u - 2 * h) + 16 * g(u - h) - 30 * g(u) + 16 * g(u + h) - g(u + 2 * h)) / (12 * h * h)
    fd = np.abs(d2) / (1 + d1 * d1) ** 1.5
    np.testing.assert_allclose(planar_curvature(curve, u), fd, atol=1e-7)


def test_sine_curve_rejects_outside_parameters():
    curve = SineCurve(1.0, 1.0, -1.0, 1.0)
    with pytest.raises(DomainError):
        curve.point(1.5)


@given(slopes)
def test_miter_turn_angle_matches_reflection(tau):
    plane = PlaneThroughOrigin.from_slope(tau)
    y = np.array([0.0, 1.0, 0.0])
    expected = math.acos(np.clip(reflect(plane, y) @ y, -1, 1))
    assert miter_turn_angle(tau) == pytest.approx(expected, abs=1e-7)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 12])
def test_miter_turn_angle_is_exterior_polygon_angle(n):
    assert miter_turn_angle(1.0 / math.tan(math.pi / n)) == pytest.approx(2 * math.pi / n, abs=1e-12)


def test_miter_turn_angle_rejects_nonpositive():
    with pytest.raises(DomainError):
        miter_turn_angle(0.0)


def test_distance_to_line():
    d = distance_to_line([[3.0, 4.0, 5.0], [0.0, 0.0, 1.0]], [0.0, 0.0, 0.0], [0.0, 0.0, 2.0])
    np.testing.assert_allclose(d, [5.0, 0.0])
