"""2D vector algebra and obstacle shapes with closest-boundary-point queries."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

EPS_ZERO = 1e-9  # below this length a vector has no usable direction


@dataclass(frozen=True)
class Vec2:
    """Immutable 2D vector in meters (or m/s in a velocity role)."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite vector components ({self.x!r}, {self.y!r})")

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> Vec2:
        return Vec2(self.x * s, self.y * s)

    def __rmul__(self, s: float) -> Vec2:
        return Vec2(self.x * s, self.y * s)

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)


ZERO = Vec2(0.0, 0.0)


def norm(v: Vec2) -> float:
    """Euclidean length."""
    return math.hypot(v.x, v.y)


def dot(a: Vec2, b: Vec2) -> float:
    return a.x * b.x + a.y * b.y


def cross(a: Vec2, b: Vec2) -> float:
    """z-component of the 3D cross product; positive when b lies CCW of a."""
    return a.x * b.y - a.y * b.x


def unit(v: Vec2) -> Vec2:
    """Unit vector parallel to v.

    Returns the zero vector when ``norm(v) < EPS_ZERO``; the zero result is
    the degeneracy flag and callers treat the associated contribution as zero.
    """
    n = math.hypot(v.x, v.y)
    if n < EPS_ZERO:
        return ZERO
    return Vec2(v.x / n, v.y / n)


def rotate(v: Vec2, angle: float) -> Vec2:
    c, s = math.cos(angle), math.sin(angle)
    return Vec2(c * v.x - s * v.y, s * v.x + c * v.y)


@dataclass(frozen=True)
class Circle:
    center: Vec2
    radius: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.radius) and self.radius > 0.0):
            raise ValueError(f"circle radius must be > 0, got {self.radius!r}")


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex polygon; vertices ordered counter-clockwise, positive area."""

    vertices: tuple[Vec2, ...]

    def __post_init__(self) -> None:
        vs = tuple(self.vertices)
        object.__setattr__(self, "vertices", vs)
        if len(vs) < 3:
            raise ValueError(f"polygon needs >= 3 vertices, got {len(vs)}")
        m = len(vs)
        area2 = 0.0
        for k in range(m):
            a, b = vs[k], vs[(k + 1) % m]
            area2 += a.x * b.y - a.y * b.x
        if area2 <= 0.0:
            raise ValueError("polygon must be counter-clockwise with positive area")
        for k in range(m):
            a, b, c = vs[k], vs[(k + 1) % m], vs[(k + 2) % m]
            e1, e2 = b - a, c - b
            if norm(e1) < EPS_ZERO:
                raise ValueError("polygon has coincident consecutive vertices")
            if cross(e1, e2) < 0.0:
                raise ValueError("polygon is not convex")


Obstacle = Union[Circle, ConvexPolygon]


def _closest_on_segment(a: Vec2, b: Vec2, p: Vec2) -> Vec2:
    ab = b - a
    denom = dot(ab, ab)
    t = 0.0 if denom == 0.0 else dot(p - a, ab) / denom
    t = min(1.0, max(0.0, t))
    return Vec2(a.x + t * ab.x, a.y + t * ab.y)


def closest_boundary_point(obstacle: Obstacle, p: Vec2) -> Vec2:
    """Boundary point minimizing the distance to p (defined for interior p too).

    A query at a circle center resolves deterministically to the boundary
    point in the +x direction.
    """
    if isinstance(obstacle, Circle):
        d = p - obstacle.center
        if norm(d) < EPS_ZERO:
            return obstacle.center + Vec2(obstacle.radius, 0.0)
        return obstacle.center + unit(d) * obstacle.radius
    best = obstacle.vertices[0]
    best_d2 = math.inf
    vs = obstacle.vertices
    for k in range(len(vs)):
        q = _closest_on_segment(vs[k], vs[(k + 1) % len(vs)], p)
        d2 = (q.x - p.x) ** 2 + (q.y - p.y) ** 2
        if d2 < best_d2:
            best, best_d2 = q, d2
    return best


def strictly_inside(obstacle: Obstacle, p: Vec2) -> bool:
    if isinstance(obstacle, Circle):
        return norm(p - obstacle.center) < obstacle.radius
    vs = obstacle.vertices
    for k in range(len(vs)):
        a, b = vs[k], vs[(k + 1) % len(vs)]
        if cross(b - a, p - a) <= 0.0:
            return False
    return True


def obstacle_distance(obstacle: Obstacle, p: Vec2) -> float:
    """Distance from p to the obstacle boundary; 0 on the boundary or inside.

    Interior points report 0, not a negative penetration depth; the simulator
    flags penetration separately as a run failure.
    """
    if isinstance(obstacle, Circle):
        return max(0.0, norm(p - obstacle.center) - obstacle.radius)
    if strictly_inside(obstacle, p):
        return 0.0
    return norm(p - closest_boundary_point(obstacle, p))
