"""Vector algebra and obstacle geometry, checked against sampling oracles."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from veeswarm.geometry import (
    EPS_ZERO,
    ZERO,
    Circle,
    ConvexPolygon,
    Vec2,
    closest_boundary_point,
    norm,
    obstacle_distance,
    rotate,
    strictly_inside,
    unit,
)

RECT = ConvexPolygon((Vec2(0, 0), Vec2(4, 0), Vec2(4, 2), Vec2(0, 2)))


def sample_boundary(obstacle, k):
    """Dense boundary sampling; the independent oracle for distance queries."""
    if isinstance(obstacle, Circle):
        return [
            obstacle.center + Vec2(obstacle.radius * math.cos(t), obstacle.radius * math.sin(t))
            for t in np.linspace(0.0, 2.0 * math.pi, k, endpoint=False)
        ]
    pts = []
    vs = obstacle.vertices
    for i in range(len(vs)):
        a, b = vs[i], vs[(i + 1) % len(vs)]
        for t in np.linspace(0.0, 1.0, k // len(vs), endpoint=False):
            pts.append(Vec2(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
    return pts


class TestVec2:
    def test_rejects_nan_and_inf(self):
        with pytest.raises(ValueError):
            Vec2(float("nan"), 0.0)
        with pytest.raises(ValueError):
            Vec2(0.0, float("inf"))

    def test_arithmetic(self):
        assert Vec2(1, 2) + Vec2(3, -1) == Vec2(4, 1)
        assert Vec2(1, 2) - Vec2(3, -1) == Vec2(-2, 3)
        assert 2.0 * Vec2(1, 2) == Vec2(2, 4)
        assert -Vec2(1, -2) == Vec2(-1, 2)


class TestNormUnit:
    def test_norm_examples(self):
        assert norm(Vec2(3, 4)) == 5.0
        assert norm(Vec2(0, 0)) == 0.0
        assert norm(Vec2(-1, 0)) == 1.0

    def test_unit_examples(self):
        assert unit(Vec2(2, 0)) == Vec2(1, 0)
        assert unit(Vec2(0, 0)) == ZERO  # zero result flags the degenerate input
        u = unit(Vec2(1, 1))
        assert u.x == pytest.approx(0.7071067811865475, abs=1e-6)
        assert u.y == pytest.approx(0.7071067811865475, abs=1e-6)

    def test_tiny_vector_is_degenerate(self):
        assert unit(Vec2(EPS_ZERO / 10, 0.0)) == ZERO

    @given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
    def test_unit_has_norm_one(self, x, y):
        v = Vec2(x, y)
        if norm(v) > EPS_ZERO:
            assert abs(norm(unit(v)) - 1.0) < 1e-9

    def test_unit_norm_one_randomized(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            v = Vec2(*rng.uniform(-100, 100, size=2))
            if norm(v) > EPS_ZERO:
                assert abs(norm(unit(v)) - 1.0) < 1e-9


class TestObstacleValidation:
    def test_circle_radius_positive(self):
        with pytest.raises(ValueError):
            Circle(Vec2(0, 0), 0.0)
        with pytest.raises(ValueError):
            Circle(Vec2(0, 0), -1.0)

    def test_polygon_needs_three_vertices(self):
        with pytest.raises(ValueError):
            ConvexPolygon((Vec2(0, 0), Vec2(1, 0)))

    def test_polygon_rejects_clockwise(self):
        with pytest.raises(ValueError):
            ConvexPolygon((Vec2(0, 0), Vec2(0, 2), Vec2(4, 2), Vec2(4, 0)))

    def test_polygon_rejects_concave(self):
        with pytest.raises(ValueError):
            ConvexPolygon((Vec2(0, 0), Vec2(4, 0), Vec2(1, 1), Vec2(0, 4)))

    def test_polygon_rejects_duplicate_vertices(self):
        with pytest.raises(ValueError):
            ConvexPolygon((Vec2(0, 0), Vec2(0, 0), Vec2(4, 0), Vec2(4, 2)))

    def test_polygon_rejects_zero_area(self):
        with pytest.raises(ValueError):
            ConvexPolygon((Vec2(0, 0), Vec2(1, 1), Vec2(2, 2)))


class TestClosestBoundaryPoint:
    def test_circle_radial_projection(self):
        q = closest_boundary_point(Circle(Vec2(0, 0), 1.0), Vec2(2, 0))
        assert q == Vec2(1, 0)

    def test_circle_center_resolves_plus_x(self):
        q = closest_boundary_point(Circle(Vec2(0, 0), 1.0), Vec2(0, 0))
        assert q == Vec2(1, 0)

    def test_rect_top_edge(self):
        q = closest_boundary_point(RECT, Vec2(2, 3))
        assert q.x == pytest.approx(2.0, abs=1e-6)
        assert q.y == pytest.approx(2.0, abs=1e-6)

    def test_matches_sampling_oracle(self):
        rng = np.random.default_rng(7)
        obstacles = [Circle(Vec2(1, -2), 1.5), RECT,
                     ConvexPolygon((Vec2(0, 0), Vec2(2, -1), Vec2(3, 2), Vec2(1, 3)))]
        for obstacle in obstacles:
            boundary = sample_boundary(obstacle, 4000)
            for _ in range(50):
                p = Vec2(*rng.uniform(-5, 7, size=2))
                q = closest_boundary_point(obstacle, p)
                oracle = min(norm(p - s) for s in boundary)
                assert norm(p - q) <= oracle + 1e-5

    def test_projection_idempotent(self):
        rng = np.random.default_rng(11)
        for obstacle in (Circle(Vec2(0.5, 0.5), 2.0), RECT):
            for _ in range(200):
                p = Vec2(*rng.uniform(-6, 8, size=2))
                q = closest_boundary_point(obstacle, p)
                q2 = closest_boundary_point(obstacle, q)
                assert norm(q - q2) < 1e-9


class TestObstacleDistance:
    def test_circle_examples(self):
        c = Circle(Vec2(0, 0), 1.0)
        assert obstacle_distance(c, Vec2(3, 0)) == 2.0
        assert obstacle_distance(c, Vec2(1, 0)) == 0.0

    def test_circle_exact_formula(self):
        rng = np.random.default_rng(3)
        c = Circle(Vec2(-1.5, 2.0), 0.75)
        for _ in range(1000):
            p = Vec2(*rng.uniform(-5, 5, size=2))
            assert obstacle_distance(c, p) == max(0.0, norm(p - c.center) - c.radius)

    def test_rect_corner_distance(self):
        assert obstacle_distance(RECT, Vec2(5, 3)) == pytest.approx(
            1.4142135623730951, abs=1e-6
        )

    def test_inside_reports_zero(self):
        assert obstacle_distance(RECT, Vec2(2, 1)) == 0.0
        assert obstacle_distance(Circle(Vec2(0, 0), 1.0), Vec2(0.2, 0.1)) == 0.0

    def test_never_exceeds_sampled_boundary_distance(self):
        rng = np.random.default_rng(19)
        obstacle = ConvexPolygon((Vec2(-1, -1), Vec2(2, -2), Vec2(3, 1), Vec2(0, 2)))
        boundary = sample_boundary(obstacle, 1000)
        for _ in range(1000):
            p = Vec2(*rng.uniform(-6, 6, size=2))
            d = obstacle_distance(obstacle, p)
            assert all(d <= norm(p - s) + 1e-12 for s in boundary)


class TestStrictlyInside:
    def test_rect(self):
        assert strictly_inside(RECT, Vec2(2, 1))
        assert not strictly_inside(RECT, Vec2(2, 0))  # on boundary
        assert not strictly_inside(RECT, Vec2(5, 1))

    def test_circle(self):
        c = Circle(Vec2(0, 0), 1.0)
        assert strictly_inside(c, Vec2(0.5, 0))
        assert not strictly_inside(c, Vec2(1, 0))
        assert not strictly_inside(c, Vec2(2, 0))


def test_rotate_preserves_norm_and_round_trips():
    rng = np.random.default_rng(5)
    for _ in range(100):
        v = Vec2(*rng.uniform(-10, 10, size=2))
        theta = rng.uniform(-math.pi, math.pi)
        assert abs(norm(rotate(v, theta)) - norm(v)) < 1e-9
        assert norm(rotate(rotate(v, theta), -theta) - v) < 1e-9
