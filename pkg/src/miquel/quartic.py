"""Miquel quartics (x^2+y^2)^2 + a x^2 + b y^2 + c = 0 placed in a Euclidean frame."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    EmptyRealLocus,
    FlatAngle,
    NoRealAxisPoint,
    WrongClass,
    ZeroDenominator,
)
from .geometry import (
    DEFAULT_TOL,
    Line2,
    Point2,
    circumcenter,
    collinear,
    intersect_lines,
    midpoint,
)
from .pattern import Pattern22, PatternClass, classify

# membership bound relative to the magnitude of the terms of F
MEMBERSHIP_TOL = 1e-7


def canonical_axis(axis: Point2) -> Point2:
    """Fix the sign of a unit direction: first nonzero component positive."""
    axis = axis.unit()
    if axis.x < 0.0 or (axis.x == 0.0 and axis.y < 0.0):
        return -axis
    return axis


@dataclass(frozen=True)
class MiquelQuartic:
    a: float
    b: float
    c: float
    origin: Point2 = Point2(0.0, 0.0)
    axis: Point2 = Point2(1.0, 0.0)
    # where the coefficients came from, e.g. the foci of the generic construction
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "axis", canonical_axis(self.axis))

    @property
    def coefficients(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    def to_frame(self, p: Point2) -> Point2:
        w = p - self.origin
        return Point2(w.dot(self.axis), w.dot(self.axis.perp()))

    def to_world(self, p: Point2) -> Point2:
        return self.origin + self.axis * p.x + self.axis.perp() * p.y

    def vector_to_world(self, v: Point2) -> Point2:
        return self.axis * v.x + self.axis.perp() * v.y

    def F(self, p: Point2) -> float:
        """The quartic polynomial at a frame-coordinate point."""
        x2 = p.x * p.x
        y2 = p.y * p.y
        s = x2 + y2
        return s * s + self.a * x2 + self.b * y2 + self.c

    def term_magnitude(self, p: Point2) -> float:
        x2 = p.x * p.x
        y2 = p.y * p.y
        s = x2 + y2
        return s * s + abs(self.a) * x2 + abs(self.b) * y2 + abs(self.c)

    def gradient(self, p: Point2) -> Point2:
        s = p.x * p.x + p.y * p.y
        return Point2(4.0 * s * p.x + 2.0 * self.a * p.x, 4.0 * s * p.y + 2.0 * self.b * p.y)

    def contains(self, p: Point2, tol: float = MEMBERSHIP_TOL) -> bool:
        """Frame-coordinate membership, relative to the size of the terms of F."""
        return abs(self.F(p)) <= tol * self.term_magnitude(p)

    @cached_property
    def extent(self) -> float:
        """Largest frame radius on the real curve; a length scale for tolerances."""
        try:
            return math.sqrt(max(hi for hi, *_ in _interval_ends(self)))
        except EmptyRealLocus:
            return math.sqrt(max(abs(self.a), abs(self.b), math.sqrt(abs(self.c)), 1e-300))


def evaluate(q: MiquelQuartic, world_point: Point2) -> float:
    return q.F(q.to_frame(world_point))


def is_on_curve(q: MiquelQuartic, world_point: Point2, tol: float = MEMBERSHIP_TOL) -> bool:
    p = q.to_frame(world_point)
    return abs(q.F(p)) <= tol * max(1.0, p.norm2() ** 2)


def is_nondegenerate(q: MiquelQuartic, rtol: float = 1e-10) -> bool:
    """a != b and 4c not in {0, a^2, b^2}, relative to ref = max(1, a^2, b^2, |c|).

    a - b has the units of sqrt(ref), so it is compared against that.
    """
    a, b, c = q.coefficients
    ref = max(1.0, a * a, b * b, abs(c))
    if abs(a - b) <= rtol * math.sqrt(ref):
        return False
    return all(abs(4.0 * c - t) > rtol * ref for t in (0.0, a * a, b * b))


def degeneracy_report(q: MiquelQuartic) -> dict:
    a, b, c = q.coefficients
    return {"a": a, "b": b, "4c": 4.0 * c, "a^2": a * a, "b^2": b * b, "a==b": a == b}


# -- construction from a pattern --------------------------------------------------


def _lambda_c_from(p2: float, xa: Point2, xc: Point2):
    """Solve for (lambda, c) from two on-curve frame points.

    With the foci at (+-p, 0) and PM^2 P'M^2 - p^4 = s^2 - 2p^2 (x^2 - y^2),
    the displayed quotients for lambda and k are evaluated with the p^4 terms
    cancelled analytically, which keeps c = p^4 - k accurate when the foci are far.
    """
    sa = xa.norm2()
    sc = xc.norm2()
    if abs(sa - sc) <= DEFAULT_TOL * max(sa, sc):
        raise ZeroDenominator("Omega A and Omega C have equal length")
    ra = sa * sa - 2.0 * p2 * (xa.x * xa.x - xa.y * xa.y)
    rc = sc * sc - 2.0 * p2 * (xc.x * xc.x - xc.y * xc.y)
    lam = (ra - rc) / (sa - sc)
    k_minus_p4 = (sa * rc - sc * ra) / (sa - sc)
    return lam, -k_minus_p4


def quartic_generic(S: Pattern22, tol: float = DEFAULT_TOL) -> MiquelQuartic:
    A, B, C, D, G, I = S.A, S.B, S.C, S.D, S.G, S.I  # noqa: E741
    if collinear(A, B, C, tol) or collinear(A, D, G, tol):
        raise FlatAngle("angle CBA or ADG is flat")
    o_b = circumcenter(A, B, C, tol)
    o_d = circumcenter(A, D, G, tol)
    P = intersect_lines(Line2(o_b, G - A), Line2(o_d, C - A), tol)
    omega = midpoint(A, I)
    P_prime = omega * 2.0 - P
    p = (P - omega).norm()
    # P = Omega leaves the axis free; the curve is then rotationally symmetric
    axis = (P - omega).unit() if p > tol * S.scale else (C - A).unit()
    frame = MiquelQuartic(0.0, 0.0, 0.0, omega, axis)
    xa = frame.to_frame(A)
    xc = frame.to_frame(C)
    p2 = p * p
    lam, c = _lambda_c_from(p2, xa, xc)
    return MiquelQuartic(
        -2.0 * p2 - lam,
        2.0 * p2 - lam,
        c,
        omega,
        axis,
        meta={"P": P, "P_prime": P_prime, "lambda": lam, "kind": "generic"},
    )


def trapezoid_coefficients(x_C: float, y_C: float, x_D: float, x_E: float, y_E: float, tol: float = DEFAULT_TOL):
    """(alpha, beta, gamma) of the trapezoidal quartic (x^2+y^2)^2 - alpha x^2 - beta y^2 + gamma = 0."""
    den = y_C * y_C - y_E * y_E
    scale2 = max(x_C * x_C + y_C * y_C, x_E * x_E + y_E * y_E, x_D * x_D)
    if abs(den) <= tol * scale2:
        raise ZeroDenominator("y_C^2 = y_E^2")
    rc = x_C * x_C + y_C * y_C
    re = x_E * x_E + y_E * y_E
    k = (x_D + x_C) ** 2 * (rc - re)
    alpha = rc + re + k / den
    beta = rc + re + k * (x_E * x_E - x_C * x_C) / (den * den)
    gamma = rc * re + k * (x_E * x_E * y_C * y_C - x_C * x_C * y_E * y_E) / (den * den)
    return alpha, beta, gamma


def quartic_trapezoidal(S: Pattern22, tol: float = DEFAULT_TOL) -> MiquelQuartic:
    cls = classify(S, tol)
    if cls is PatternClass.GENERIC:
        raise WrongClass("pattern is generic")
    if cls is PatternClass.TRAPEZOIDAL_VERTICAL:
        # the transposed lattice is horizontal trapezoidal with the same Omega and curve
        q = quartic_trapezoidal(S.transposed(), tol)
        return MiquelQuartic(q.a, q.b, q.c, q.origin, q.axis, meta={**q.meta, "kind": "trapezoidal-vertical"})
    omega = midpoint(S.A, S.I)
    frame = MiquelQuartic(0.0, 0.0, 0.0, omega, S.C - S.A)
    c_ = frame.to_frame(S.C)
    d_ = frame.to_frame(S.D)
    e_ = frame.to_frame(S.E)
    alpha, beta, gamma = trapezoid_coefficients(c_.x, c_.y, d_.x, e_.x, e_.y, tol)
    return MiquelQuartic(-alpha, -beta, gamma, omega, frame.axis, meta={"kind": "trapezoidal-horizontal"})


def quartic_of_pattern(S: Pattern22, tol: float = DEFAULT_TOL) -> MiquelQuartic:
    if classify(S, tol) is PatternClass.GENERIC:
        return quartic_generic(S, tol)
    return quartic_trapezoidal(S, tol)


def foci(q: MiquelQuartic) -> tuple[Point2, Point2]:
    """World foci at frame (+-p, 0) with p^2 = (b - a)/4, or on the frame y-axis when b < a."""
    p2 = (q.b - q.a) / 4.0
    if p2 >= 0.0:
        p = math.sqrt(p2)
        return q.to_world(Point2(p, 0.0)), q.to_world(Point2(-p, 0.0))
    p = math.sqrt(-p2)
    return q.to_world(Point2(0.0, p)), q.to_world(Point2(0.0, -p))


# -- real locus ----------------------------------------------------------------------

X_ZERO = "x=0"  # endpoint where the curve crosses the frame y-axis
Y_ZERO = "y=0"  # endpoint where the curve crosses the frame x-axis


def _real_roots(p: float, r: float) -> list[float]:
    """Real roots of s^2 + p s + r, sorted, computed stably."""
    disc = p * p - 4.0 * r
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    t = -0.5 * (p + math.copysign(sq, p))
    if t == 0.0:
        return [0.0, 0.0]
    return sorted((t, r / t))


def x_squared(q: MiquelQuartic, s: float) -> float:
    return (s * s + q.b * s + q.c) / (q.b - q.a)


def y_squared(q: MiquelQuartic, s: float) -> float:
    return -(s * s + q.a * s + q.c) / (q.b - q.a)


def _interval_ends(q: MiquelQuartic):
    """Admissible s-intervals (hi, lo, kind_lo, kind_hi) where x^2, y^2 >= 0."""
    if q.a == q.b:
        raise EmptyRealLocus("a = b: the s-parametrization is undefined")
    tagged = [(r, X_ZERO) for r in _real_roots(q.b, q.c)] + [(r, Y_ZERO) for r in _real_roots(q.a, q.c)]
    tagged.sort()
    out = []
    for (lo, klo), (hi, khi) in zip(tagged, tagged[1:]):
        if hi <= lo or hi < 0.0:
            continue
        mid = 0.5 * (lo + hi)
        if mid > 0.0 and x_squared(q, mid) >= 0.0 and y_squared(q, mid) >= 0.0:
            out.append((hi, lo, klo, khi))
    if not out:
        raise EmptyRealLocus("no real points")
    return out


@dataclass(frozen=True)
class SInterval:
    lo: float
    hi: float
    kind_lo: str
    kind_hi: str


def admissible_intervals(q: MiquelQuartic) -> list[SInterval]:
    return [SInterval(lo, hi, klo, khi) for hi, lo, klo, khi in _interval_ends(q)]


def point_at(q: MiquelQuartic, s: float, sx: int = 1, sy: int = 1) -> Point2:
    """Frame point with x^2 + y^2 = s in the quadrant of signs (sx, sy)."""
    return Point2(sx * math.sqrt(max(x_squared(q, s), 0.0)), sy * math.sqrt(max(y_squared(q, s), 0.0)))


@dataclass(frozen=True)
class QuarticBranchSample:
    s_lo: float
    s_hi: float
    signs: tuple[int, int]
    points: list  # frame coordinates, ordered by s


SIGN_PAIRS = ((1, 1), (-1, 1), (-1, -1), (1, -1))


def sample_real_curve(q: MiquelQuartic, points_per_branch: int = 400) -> list[QuarticBranchSample]:
    """Sample every quadrant arc of the real curve, cosine-spaced in s so the axis crossings are resolved."""
    out = []
    theta = np.linspace(0.0, math.pi, points_per_branch)
    for iv in admissible_intervals(q):
        s_values = iv.lo + (iv.hi - iv.lo) * 0.5 * (1.0 - np.cos(theta))
        s_values[0], s_values[-1] = iv.lo, iv.hi
        for sx, sy in SIGN_PAIRS:
            pts = [point_at(q, float(s), sx, sy) for s in s_values]
            out.append(QuarticBranchSample(iv.lo, iv.hi, (sx, sy), pts))
    return out


def x_axis_points(q: MiquelQuartic) -> list[Point2]:
    """Real points of the curve on the frame x-axis, by decreasing x."""
    ts = [t for t in _real_roots(q.a, q.c) if t >= 0.0]
    if not ts:
        raise NoRealAxisPoint(f"x^2 + ({q.a}) x + ({q.c}) has no nonnegative root")
    xs = set()
    for t in ts:
        r = math.sqrt(t)
        xs.update((r, -r))
    return [Point2(x, 0.0) for x in sorted(xs, reverse=True)]
