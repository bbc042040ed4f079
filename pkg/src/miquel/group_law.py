"""Group law on non-degenerate Miquel quartics.

The neutral element N is a point of the curve on the frame x-axis. Inverse
is reflection through that axis, and P1 + P2 is the reflection of the fourth
intersection of the curve with the circle through P1, P2 and N. The four
intersections of any circle with the curve sum to zero in this law.

All points here are in frame coordinates unless a name says otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .errors import (
    AmbiguousTangency,
    CoincidentCenters,
    DegenerateGradient,
    NotNondegenerate,
    NotOnCurve,
    SolverFailure,
)
from .geometry import (
    DEFAULT_TOL,
    Circle2,
    Line2,
    Point2,
    circumcenter,
    distance,
    intersect_lines,
    perpendicular_bisector,
    reflect_point,
)
from .pattern import Color, Pattern22
from .quartic import (
    MEMBERSHIP_TOL,
    MiquelQuartic,
    admissible_intervals,
    degeneracy_report,
    is_nondegenerate,
    point_at,
    quartic_of_pattern,
    x_axis_points,
)

# area of (P1, P2, N) below this fraction of extent^2 switches to the line case
LINE_CASE_TOL = 1e-10
# coincidence threshold for the N and P1 = P2 shortcuts, relative to the extent
SAME_POINT_TOL = 1e-12
# |z| - 1 below this is a real intersection, above COMPLEX_ROOT_TOL a complex one
REAL_ROOT_TOL = 1e-6
COMPLEX_ROOT_TOL = 1e-4


@dataclass(frozen=True)
class GroupPoint:
    q: MiquelQuartic
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not self.q.contains(Point2(self.x, self.y), MEMBERSHIP_TOL):
            raise NotOnCurve(f"({self.x}, {self.y}) is not on the quartic")

    @property
    def point(self) -> Point2:
        return Point2(self.x, self.y)

    @property
    def world(self) -> Point2:
        return self.q.to_world(self.point)

    def distance(self, other: GroupPoint) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class IntersectionList:
    points: list  # (GroupPoint, multiplicity) pairs, real intersections only
    has_complex: bool

    @property
    def real_multiplicity(self) -> int:
        return sum(m for _, m in self.points)


def _on(q: MiquelQuartic, p: Point2) -> GroupPoint:
    return GroupPoint(q, p.x, p.y)


def lift(q: MiquelQuartic, world_point: Point2) -> GroupPoint:
    return _on(q, q.to_frame(world_point))


def require_nondegenerate(q: MiquelQuartic) -> None:
    if not is_nondegenerate(q):
        raise NotNondegenerate("the quartic is degenerate", degeneracy_report(q))


def neutral(q: MiquelQuartic) -> GroupPoint:
    return _on(q, x_axis_points(q)[0])


def negate(q: MiquelQuartic, P: GroupPoint) -> GroupPoint:
    return GroupPoint(q, P.x, -P.y)


# -- curve restricted to circles and lines ---------------------------------------------


def circle_polynomial(q: MiquelQuartic, center: Point2, radius: float) -> Polynomial:
    """z^2 F(center + radius e^{it}) as a degree-4 polynomial in z = e^{it}."""
    R = radius
    zx = Polynomial([R / 2, center.x, R / 2])
    zy = Polynomial([1j * R / 2, center.y, -1j * R / 2])
    # x^2 + y^2 is a degree-one trigonometric polynomial
    zs = Polynomial((zx * zx + zy * zy).coef[1:4])
    return zs * zs + q.a * zx * zx + q.b * zy * zy + Polynomial([0, 0, q.c])


def line_polynomial(q: MiquelQuartic, line: Line2) -> Polynomial:
    """F(anchor + t direction) as a monic degree-4 polynomial in t."""
    x = Polynomial([line.anchor.x, line.direction.x])
    y = Polynomial([line.anchor.y, line.direction.y])
    s = x * x + y * y
    return s * s + q.a * x * x + q.b * y * y + q.c


def _polish_on_circle(q: MiquelQuartic, center: Point2, R: float, t: float, iters: int = 4) -> Point2:
    best = center + Point2(math.cos(t), math.sin(t)) * R
    best_val = abs(q.F(best))
    for _ in range(iters):
        tangent = Point2(-math.sin(t), math.cos(t)) * R
        deriv = q.gradient(best).dot(tangent)
        if deriv == 0.0:
            break
        t_new = t - q.F(best) / deriv
        cand = center + Point2(math.cos(t_new), math.sin(t_new)) * R
        val = abs(q.F(cand))
        if val >= best_val:
            break
        t, best, best_val = t_new, cand, val
    return best


def _polish_on_line(q: MiquelQuartic, line: Line2, t: float, iters: int = 4) -> Point2:
    best = line.point_at(t)
    best_val = abs(q.F(best))
    for _ in range(iters):
        deriv = q.gradient(best).dot(line.direction)
        if deriv == 0.0:
            break
        t_new = t - q.F(best) / deriv
        cand = line.point_at(t_new)
        val = abs(q.F(cand))
        if val >= best_val:
            break
        t, best, best_val = t_new, cand, val
    return best


def _cluster(values, tol):
    """Group nearby roots; returns (mean, count) pairs."""
    groups = []
    for v in values:
        for g in groups:
            if abs(v - g[0] / g[1]) <= tol:
                g[0] += v
                g[1] += 1
                break
        else:
            groups.append([v, 1])
    return [(s / n, n) for s, n in groups]


def circle_quartic_intersections(q: MiquelQuartic, shape) -> IntersectionList:
    """Real intersections, with multiplicity, of the curve with a frame circle or line."""
    require_nondegenerate(q)
    has_complex = False
    out = []
    if isinstance(shape, Circle2):
        roots = np.roots(circle_polynomial(q, shape.center, shape.radius).coef[::-1])
        real = []
        for z in roots:
            dev = abs(abs(z) - 1.0)
            if dev <= REAL_ROOT_TOL:
                real.append(z / abs(z))
            elif dev <= COMPLEX_ROOT_TOL:
                raise AmbiguousTangency(f"root with |z| = {abs(z)} is neither clearly real nor complex")
            else:
                has_complex = True
        for z, m in _cluster(real, math.sqrt(REAL_ROOT_TOL)):
            p = _polish_on_circle(q, shape.center, shape.radius, math.atan2(z.imag, z.real))
            out.append((_checked(q, p), m))
    elif isinstance(shape, Line2):
        poly = line_polynomial(q, shape)
        scale = max(q.extent, abs(shape.anchor.x), abs(shape.anchor.y))
        real = []
        for t in np.roots(poly.coef[::-1]):
            dev = abs(t.imag) / scale
            if dev <= REAL_ROOT_TOL:
                real.append(t.real)
            elif dev <= COMPLEX_ROOT_TOL:
                raise AmbiguousTangency(f"root {t} is neither clearly real nor complex")
            else:
                has_complex = True
        for t, m in _cluster(sorted(real), math.sqrt(REAL_ROOT_TOL) * scale):
            out.append((_checked(q, _polish_on_line(q, shape, t)), m))
    else:
        raise TypeError(f"expected Circle2 or Line2, got {type(shape).__name__}")
    return IntersectionList(out, has_complex)


def _checked(q: MiquelQuartic, p: Point2) -> GroupPoint:
    try:
        return _on(q, p)
    except NotOnCurve as exc:
        raise SolverFailure(f"intersection {p} could not be polished onto the curve") from exc


def _fourth_on_circle(q: MiquelQuartic, center: Point2, R: float, known: list[Point2]) -> GroupPoint:
    """Fourth intersection from three known ones, by the product of the roots."""
    poly = circle_polynomial(q, center, R)
    lead = poly.coef[4] if len(poly.coef) > 4 else 0.0
    if abs(lead) <= 1e-14 * max(np.abs(poly.coef)):
        raise SolverFailure("circle meets the curve at the circular points")
    z = poly.coef[0] / lead
    for p in known:
        w = p - center
        z /= complex(w.x, w.y) / R
    if abs(abs(z) - 1.0) > REAL_ROOT_TOL:
        raise SolverFailure(f"fourth intersection is not real (|z| = {abs(z)})")
    p = _polish_on_circle(q, center, R, math.atan2(z.imag, z.real))
    return _checked(q, p)


def _fourth_on_line(q: MiquelQuartic, line: Line2, known: list[Point2]) -> GroupPoint:
    """Fourth intersection from three known ones, by the sum of the roots."""
    poly = line_polynomial(q, line)
    t = -poly.coef[3] / poly.coef[4] - sum(line.parameter_of(p) for p in known)
    return _checked(q, _polish_on_line(q, line, t))


# -- group operations ------------------------------------------------------------------


def _same(q: MiquelQuartic, P: GroupPoint, Q: GroupPoint) -> bool:
    return P.distance(Q) <= SAME_POINT_TOL * q.extent


def add(q: MiquelQuartic, P1: GroupPoint, P2: GroupPoint) -> GroupPoint:
    if (P2.x, P2.y) < (P1.x, P1.y):
        P1, P2 = P2, P1  # fixed operand order makes the sum exactly symmetric
    N = neutral(q)
    if _same(q, P1, N):
        return P2
    if _same(q, P2, N):
        return P1
    if _same(q, P1, P2):
        return double(q, P1)
    a, b, n = P1.point, P2.point, N.point
    area = 0.5 * abs((a - n).cross(b - n))
    if area < LINE_CASE_TOL * q.extent**2:
        far = a if distance(a, n) >= distance(b, n) else b
        fourth = _fourth_on_line(q, Line2.through(n, far), [a, b, n])
    else:
        center = circumcenter(a, b, n, tol=0.0)
        fourth = _fourth_on_circle(q, center, distance(center, n), [a, b, n])
    return negate(q, fourth)


def double(q: MiquelQuartic, P: GroupPoint) -> GroupPoint:
    N = neutral(q)
    if _same(q, P, N):
        return N
    p, n = P.point, N.point
    g = q.gradient(p)
    if g.norm() <= DEFAULT_TOL * q.extent**3:
        raise DegenerateGradient(f"gradient vanishes at {p}")
    normal = g.unit()
    w = p - n
    denom = 2.0 * normal.dot(w)
    # circle through N tangent at P: center P + t normal with |P + t normal - N| = |t|
    if abs(denom) * 1e10 * q.extent <= w.norm2():
        fourth = _fourth_on_line(q, Line2(p, normal.perp()), [p, p, n])
    else:
        t = -w.norm2() / denom
        center = p + normal * t
        fourth = _fourth_on_circle(q, center, abs(t), [p, p, n])
    return negate(q, fourth)


def mul(q: MiquelQuartic, n: int, P: GroupPoint) -> GroupPoint:
    if n < 0:
        return negate(q, mul(q, -n, P))
    result = neutral(q)
    addend = P
    while n:
        if n & 1:
            result = add(q, result, addend)
        n >>= 1
        if n:
            addend = double(q, addend)
    return result


def sub(q: MiquelQuartic, P1: GroupPoint, P2: GroupPoint) -> GroupPoint:
    return add(q, P1, negate(q, P2))


# -- Miquel dynamics in group-law form --------------------------------------------------


def predict_mutation(S: Pattern22, color: Color, q: MiquelQuartic | None = None) -> Point2:
    """World position of E after a renormalized mutation: -E - 2A (white) or -E - 2C (black)."""
    q = q or quartic_of_pattern(S)
    require_nondegenerate(q)
    E = lift(q, S.E)
    corner = lift(q, S.A if color is Color.WHITE else S.C)
    return negate(q, add(q, E, double(q, corner))).world


def translation_step(q: MiquelQuartic, S: Pattern22) -> GroupPoint:
    """The group element 2(A - C) by which one white+black step moves E."""
    return mul(q, 2, sub(q, lift(q, S.A), lift(q, S.C)))


def predict_orbit(S: Pattern22, k: int, q: MiquelQuartic | None = None) -> Point2:
    """World position of E after k steps: E + k * 2(A - C)."""
    q = q or quartic_of_pattern(S)
    require_nondegenerate(q)
    return add(q, lift(q, S.E), mul(q, k, translation_step(q, S))).world


def tangent_circle_center(q: MiquelQuartic, V: Point2, E: Point2, tol: float = DEFAULT_TOL) -> Point2:
    """Center of the circle through E tangent to the curve at its point V (world coordinates)."""
    g = q.gradient(q.to_frame(V))
    if g.norm() == 0.0:
        raise DegenerateGradient(f"gradient vanishes at {V}")
    normal = Line2(V, q.vector_to_world(g).unit())
    return intersect_lines(normal, perpendicular_bisector(V, E), tol)


def tangent_circle_mutation(
    S: Pattern22, q: MiquelQuartic | None = None, tol: float = DEFAULT_TOL, color: Color = Color.WHITE
) -> Point2:
    """E after a renormalized white mutation, as the reflection of E through the line O_A O_I.

    O_A (resp. O_I) is the center of the circle through E tangent to the curve at A (resp. I).
    The black mutation uses C and G in place of A and I.
    """
    q = q or quartic_of_pattern(S)
    first, second = (S.A, S.I) if color is Color.WHITE else (S.C, S.G)
    o_a = tangent_circle_center(q, first, S.E, tol)
    o_i = tangent_circle_center(q, second, S.E, tol)
    if distance(o_a, o_i) <= tol * S.scale:
        raise CoincidentCenters("tangent circles share a center")
    return reflect_point(S.E, Line2.through(o_a, o_i))


def random_curve_point(q: MiquelQuartic, rng: np.random.Generator) -> GroupPoint:
    """A random real point, away from the axis crossings of its quadrant arc."""
    intervals = admissible_intervals(q)
    iv = intervals[rng.integers(len(intervals))]
    s = iv.lo + (iv.hi - iv.lo) * rng.uniform(0.05, 0.95)
    sx, sy = rng.choice([-1, 1], size=2)
    return _on(q, point_at(q, s, int(sx), int(sy)))


def base_point_sum_invariance(q: MiquelQuartic, P: GroupPoint, trials: int, rng: np.random.Generator) -> dict:
    """Sum, in the N-based law, of the three further intersections of random circles through P.

    Each circle passes through P and two random real curve points, so the last
    intersection is real as well. Near-collinear draws and solver failures are
    skipped and counted.
    """
    require_nondegenerate(q)
    sums = []
    skipped = 0
    p = P.point
    unit = q.extent
    for _ in range(trials):
        X, Y = random_curve_point(q, rng), random_curve_point(q, rng)
        x, y = X.point, Y.point
        if min(distance(p, x), distance(p, y), distance(x, y)) <= 1e-3 * unit or abs((x - p).cross(y - p)) <= 1e-3 * unit**2:
            skipped += 1
            continue
        center = circumcenter(p, x, y, tol=0.0)
        try:
            Z = _fourth_on_circle(q, center, distance(center, p), [p, x, y])
        except SolverFailure:
            skipped += 1
            continue
        sums.append(add(q, add(q, X, Y), Z))
    spread = max((s.distance(t) for s in sums for t in sums), default=0.0)
    return {
        "completed": len(sums),
        "skipped": skipped,
        "spread": spread,
        "sums": [(s.x, s.y) for s in sums],
    }
