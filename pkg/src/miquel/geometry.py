"""Plane geometry primitives shared by every other module.

All predicates are similarity covariant: tolerances apply to quantities
normalized by ``scale`` = max pairwise distance among the inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .errors import CollinearPoints, DegenerateInput, ParallelLines

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DegenerateInput(f"non-finite point ({self.x}, {self.y})")

    def __add__(self, other: Point2) -> Point2:
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Point2) -> Point2:
        return Point2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> Point2:
        return Point2(-self.x, -self.y)

    def __mul__(self, k: float) -> Point2:
        return Point2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __truediv__(self, k: float) -> Point2:
        return Point2(self.x / k, self.y / k)

    def __iter__(self):
        yield self.x
        yield self.y

    def dot(self, other: Point2) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Point2) -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def norm2(self) -> float:
        return self.x * self.x + self.y * self.y

    def perp(self) -> Point2:
        """Counterclockwise quarter turn."""
        return Point2(-self.y, self.x)

    def unit(self) -> Point2:
        n = self.norm()
        if n == 0.0:
            raise DegenerateInput("cannot normalize the zero vector")
        return Point2(self.x / n, self.y / n)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


ORIGIN = Point2(0.0, 0.0)


def distance(p: Point2, q: Point2) -> float:
    return math.hypot(p.x - q.x, p.y - q.y)


def midpoint(p: Point2, q: Point2) -> Point2:
    return Point2(0.5 * (p.x + q.x), 0.5 * (p.y + q.y))


def scale_of(*points: Point2) -> float:
    """Max pairwise distance, floored at the smallest positive float."""
    s = 0.0
    for p, q in combinations(points, 2):
        s = max(s, distance(p, q))
    return s if s > 0.0 else math.ulp(0.0)


@dataclass(frozen=True, slots=True)
class Line2:
    anchor: Point2
    direction: Point2

    def __post_init__(self):
        if abs(self.direction.norm() - 1.0) > 1e-12:
            object.__setattr__(self, "direction", self.direction.unit())

    @classmethod
    def through(cls, p: Point2, q: Point2) -> Line2:
        if p == q:
            raise DegenerateInput("line through coincident points")
        return cls(p, (q - p).unit())

    def point_at(self, t: float) -> Point2:
        return self.anchor + self.direction * t

    def parameter_of(self, p: Point2) -> float:
        return (p - self.anchor).dot(self.direction)


@dataclass(frozen=True, slots=True)
class Circle2:
    center: Point2
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise DegenerateInput(f"non-positive radius {self.radius}")


def circumcenter(p1: Point2, p2: Point2, p3: Point2, tol: float = DEFAULT_TOL) -> Point2:
    scale = scale_of(p1, p2, p3)
    # work relative to p1 for conditioning
    b = p2 - p1
    c = p3 - p1
    d = 2.0 * b.cross(c)
    if abs(d) <= 2.0 * tol * scale * scale:
        raise CollinearPoints(f"collinear points {p1}, {p2}, {p3}")
    b2 = b.norm2()
    c2 = c.norm2()
    ux = (c.y * b2 - b.y * c2) / d
    uy = (b.x * c2 - c.x * b2) / d
    return Point2(p1.x + ux, p1.y + uy)


def circumcircle(p1: Point2, p2: Point2, p3: Point2, tol: float = DEFAULT_TOL) -> Circle2:
    o = circumcenter(p1, p2, p3, tol)
    return Circle2(o, distance(o, p1))


def reflect_point(p: Point2, line: Line2) -> Point2:
    w = p - line.anchor
    d = line.direction
    return line.anchor + d * (2.0 * w.dot(d)) - w


def _check_distinct(points, tol, scale):
    for p, q in combinations(points, 2):
        if distance(p, q) <= tol * scale:
            raise DegenerateInput(f"coincident points {p} and {q}")


def collinear(p1: Point2, p2: Point2, p3: Point2, tol: float = DEFAULT_TOL) -> bool:
    scale = scale_of(p1, p2, p3)
    return abs((p2 - p1).cross(p3 - p1)) <= tol * scale * scale


def concyclicity_residual(p1: Point2, p2: Point2, p3: Point2, p4: Point2) -> float:
    """The 4x4 determinant with rows [x, y, x^2+y^2, 1], normalized by scale^4."""
    scale = scale_of(p1, p2, p3, p4)
    rows = []
    for p in (p2, p3, p4):
        x = (p.x - p1.x) / scale
        y = (p.y - p1.y) / scale
        rows.append((x, y, x * x + y * y))
    # translated so p1 is the origin: the determinant reduces to 3x3
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = rows
    return (
        a1 * (b2 * c3 - b3 * c2)
        - a2 * (b1 * c3 - b3 * c1)
        + a3 * (b1 * c2 - b2 * c1)
    )


def concyclic(
    p1: Point2, p2: Point2, p3: Point2, p4: Point2, tol: float = DEFAULT_TOL
) -> bool:
    pts = (p1, p2, p3, p4)
    scale = scale_of(*pts)
    _check_distinct(pts, tol, scale)
    if all(collinear(*tri, tol=tol) for tri in combinations(pts, 3)):
        return False
    return abs(concyclicity_residual(*pts)) <= tol


def signed_angle(vertex: Point2, frm: Point2, to: Point2) -> float:
    """Angle from ray vertex->frm to ray vertex->to, counterclockwise positive, in (-pi, pi]."""
    u = frm - vertex
    v = to - vertex
    if u.norm2() == 0.0 or v.norm2() == 0.0:
        raise DegenerateInput("angle with coincident points")
    ang = math.atan2(u.cross(v), u.dot(v))
    return math.pi if ang == -math.pi else ang


def wrap_angle(theta: float) -> float:
    """Reduce to (-pi, pi]."""
    r = math.remainder(theta, 2.0 * math.pi)
    return math.pi if r == -math.pi else r


def intersect_lines(l1: Line2, l2: Line2, tol: float = DEFAULT_TOL) -> Point2:
    denom = l1.direction.cross(l2.direction)
    if abs(denom) <= tol:
        raise ParallelLines("lines are parallel")
    t = (l2.anchor - l1.anchor).cross(l2.direction) / denom
    return l1.point_at(t)


def perpendicular_bisector(p: Point2, q: Point2) -> Line2:
    if p == q:
        raise DegenerateInput("bisector of coincident points")
    return Line2(midpoint(p, q), (q - p).perp().unit())
