"""The invariant form d(x^2+y^2)/(xy) on Miquel quartics and its modulus as a measure.

Everything is integrated in s = x^2 + y^2. On an admissible interval
[lo, hi] the radicand factors as (s - lo)(hi - s) q2(s) with q2 > 0, and
the substitution s = lo + (hi - lo)(1 - cos theta)/2 turns
|b - a| ds / sqrt(radicand) into the smooth |b - a| dtheta / sqrt(q2(s)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .conserve import conserving_step, invariant_level
from .errors import BranchTrackingFailure, DifferentBranches, OutOfDomain, QuadratureFailure
from .geometry import Point2
from .group_law import GroupPoint, require_nondegenerate
from .pattern import Pattern22
from .quartic import X_ZERO, Y_ZERO, MiquelQuartic, _real_roots, admissible_intervals, quartic_of_pattern

QUAD_EPSREL = 1e-12


def omega_integrand(q: MiquelQuartic, s: float) -> float:
    """|d(x^2+y^2)/(xy)| per unit s, from x^2 y^2 = -(s^2+as+c)(s^2+bs+c)/(b-a)^2."""
    rad = -(s * s + q.a * s + q.c) * (s * s + q.b * s + q.c)
    if not rad > 0.0:
        raise OutOfDomain(f"s = {s} is outside the admissible intervals")
    return abs(q.b - q.a) / math.sqrt(rad)


def _other_root(roots: list[float], r: float) -> float:
    return roots[1] if abs(roots[0] - r) <= abs(roots[1] - r) else roots[0]


class _Arc:
    """One admissible s-interval with its smooth theta integrand."""

    def __init__(self, q: MiquelQuartic, lo: float, hi: float, kind_lo: str, kind_hi: str):
        self.q = q
        self.lo, self.hi = lo, hi
        self.kind_lo, self.kind_hi = kind_lo, kind_hi
        self.x_roots = _real_roots(q.b, q.c)  # x = 0
        self.y_roots = _real_roots(q.a, q.c)  # y = 0
        self.width = hi - lo
        self._total = None

    def _partner(self, kind: str, root: float) -> float:
        return _other_root(self.x_roots if kind == X_ZERO else self.y_roots, root)

    def q2(self, s: float) -> float:
        q = self.q
        if self.kind_lo == self.kind_hi:
            # both ends from one factor; the other factor remains whole
            if self.kind_lo == Y_ZERO:
                return s * s + q.b * s + q.c
            return s * s + q.a * s + q.c
        return (s - self._partner(self.kind_lo, self.lo)) * (s - self._partner(self.kind_hi, self.hi))

    def s_of(self, theta: float) -> float:
        return self.lo + self.width * 0.5 * (1.0 - math.cos(theta))

    def h(self, theta: float) -> float:
        v = self.q2(self.s_of(theta))
        if not v > 0.0:
            raise QuadratureFailure(f"non-positive reduced radicand {v} at theta = {theta}")
        return abs(self.q.b - self.q.a) / math.sqrt(v)

    def _gap(self, kind: str, root: float, p: Point2) -> float:
        """|s - root| recovered from the vanishing coordinate, accurate near the axis."""
        q = self.q
        s = p.norm2()
        partner = self._partner(kind, root)
        if kind == X_ZERO:
            return abs((q.b - q.a) * p.x * p.x / (s - partner))
        return abs((q.b - q.a) * p.y * p.y / (s - partner))

    def theta_of(self, p: Point2) -> float:
        s = p.norm2()
        if s - self.lo <= self.hi - s:
            frac = self._gap(self.kind_lo, self.lo, p) / self.width
            return 2.0 * math.asin(math.sqrt(min(max(frac, 0.0), 1.0)))
        frac = self._gap(self.kind_hi, self.hi, p) / self.width
        return math.pi - 2.0 * math.asin(math.sqrt(min(max(frac, 0.0), 1.0)))

    def integral(self, t1: float, t2: float) -> float:
        if t1 == t2:
            return 0.0
        val, err = quad(self.h, min(t1, t2), max(t1, t2), epsabs=0.0, epsrel=QUAD_EPSREL, limit=200)
        if not math.isfinite(val) or err > 1e-9 * abs(val) + 1e-300:
            raise QuadratureFailure(f"quadrature error estimate {err:.3e} for value {val:.3e}")
        return val

    @property
    def total(self) -> float:
        if self._total is None:
            self._total = self.integral(0.0, math.pi)
        return self._total

    def contains_s(self, s: float, slack: float) -> bool:
        return self.lo - slack <= s <= self.hi + slack


@dataclass(frozen=True)
class ArcMeasure:
    value: float
    branch: str


def _arcs(q: MiquelQuartic) -> list[_Arc]:
    return [_Arc(q, iv.lo, iv.hi, iv.kind_lo, iv.kind_hi) for iv in admissible_intervals(q)]


def _sign(t: float) -> int:
    return 1 if t >= 0.0 else -1


def _locate(arcs: list[_Arc], p: Point2, slack_rel: float = 1e-6) -> int:
    s = p.norm2()
    for k, arc in enumerate(arcs):
        if arc.contains_s(s, slack_rel * max(arc.width, 1e-300)):
            return k
    raise BranchTrackingFailure(f"point {p} (s = {s}) lies in no admissible interval")


def branch_of(q: MiquelQuartic, P: GroupPoint) -> str:
    k = _locate(_arcs(q), P.point)
    return f"{k}:{'+' if P.x >= 0 else '-'}{'+' if P.y >= 0 else '-'}"


def arc_measure(q: MiquelQuartic, P1: GroupPoint, P2: GroupPoint) -> ArcMeasure:
    """|omega|-length of the arc between two points of one quadrant arc."""
    require_nondegenerate(q)
    arcs = _arcs(q)
    k1 = _locate(arcs, P1.point)
    k2 = _locate(arcs, P2.point)
    same_quadrant = all(
        a == 0.0 or b == 0.0 or _sign(a) == _sign(b) for a, b in ((P1.x, P2.x), (P1.y, P2.y))
    )
    if k1 != k2 or not same_quadrant:
        raise DifferentBranches("points are not on one quadrant arc")
    arc = arcs[k1]
    value = arc.integral(arc.theta_of(P1.point), arc.theta_of(P2.point))
    return ArcMeasure(value, branch_of(q, P1))


# -- positions along ovals ---------------------------------------------------------------


@dataclass(frozen=True)
class OvalPosition:
    oval: str
    position: float  # |omega|-measure from the oval's base point, in [0, length)
    length: float


def oval_position(q: MiquelQuartic, p: Point2, arcs: list[_Arc] | None = None) -> OvalPosition:
    """Locate a frame point on its real component by cumulative |omega|-measure.

    A component around the origin is four quadrant arcs, traversed counterclockwise
    from its crossing with the positive x-axis. A component meeting only one axis
    is two arcs, swept from its inner crossing across the positive half-plane.
    """
    arcs = arcs if arcs is not None else _arcs(q)
    k = _locate(arcs, p)
    arc = arcs[k]
    H = arc.total
    G = arc.integral(0.0, arc.theta_of(p))
    sx, sy = _sign(p.x), _sign(p.y)
    if arc.kind_lo != arc.kind_hi:
        g = G if arc.kind_lo == Y_ZERO else H - G
        pos = {(1, 1): g, (-1, 1): 2 * H - g, (-1, -1): 2 * H + g, (1, -1): 4 * H - g}[(sx, sy)]
        return OvalPosition(f"{k}", pos % (4 * H), 4 * H)
    if arc.kind_lo == Y_ZERO:
        # component on one side of the y-axis
        pos = G if sy > 0 else 2 * H - G
        return OvalPosition(f"{k}:x{'+' if sx > 0 else '-'}", pos % (2 * H), 2 * H)
    pos = G if sx > 0 else 2 * H - G
    return OvalPosition(f"{k}:y{'+' if sy > 0 else '-'}", pos % (2 * H), 2 * H)


def step_measure(a: OvalPosition, b: OvalPosition) -> float:
    """|omega|-length of the shorter arc between two positions on one oval."""
    d = (b.position - a.position) % a.length
    return min(d, a.length - d)


def orbit_measure_report(S: Pattern22, steps: int, reverse: bool = False) -> list[dict]:
    """|omega| distances between successive E positions along the orbit.

    When consecutive positions alternate between two ovals, E_k is compared with
    E_{k+2} instead and the entries are flagged as hops.
    """
    if steps <= 0:
        return []
    q = quartic_of_pattern(S)
    require_nondegenerate(q)
    arcs = _arcs(q)
    positions = []
    T = S
    level = invariant_level(S)
    for k in range(steps + 1):
        positions.append(oval_position(q, q.to_frame(T.E), arcs))
        if k < steps:
            T = conserving_step(T, level, reverse=reverse).pattern
    hop = any(a.oval != b.oval for a, b in zip(positions, positions[1:]))
    stride = 2 if hop else 1
    report = []
    for k in range(steps + 1 - stride):
        a, b = positions[k], positions[k + stride]
        if a.oval != b.oval:
            raise BranchTrackingFailure(f"E_{k} and E_{k + stride} are on different ovals")
        report.append(
            {"from_step": k, "to_step": k + stride, "branch": a.oval, "measure": step_measure(a, b), "hop": hop}
        )
    return report
