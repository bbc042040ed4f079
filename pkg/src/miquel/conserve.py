"""Projection of orbit iterates back onto the level set of the conserved quantities.

A full Miquel step fixes A, C, G, I and the line angles at B and D exactly, so
B stays on the circle through A, B, C and D on the circle through A, D, G
(a line when the angle is flat). Floating-point steps drift off this level set
by roundoff each time. The drift feeds back into the curve and the translation,
and the phase error then grows faster than linearly. Re-solving B and D on their
fixed loci, with E projected onto the fixed curve, removes that feedback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CollinearPoints, MiquelError, SolverFailure
from .geometry import DEFAULT_TOL, Circle2, Line2, Point2, circumcircle, concyclicity_residual, distance
from .pattern import Pattern22, from_points, miquel_step
from .quartic import MiquelQuartic, quartic_of_pattern

NEWTON_ITERS = 6
FD_STEP = 1e-6
RESIDUAL_TOL = 1e-12


class _Locus:
    """A fixed circle or line, parametrized by angle or by arclength."""

    def __init__(self, p: Point2, vertex: Point2, r: Point2, tol: float):
        try:
            self.circle: Circle2 | None = circumcircle(p, vertex, r, tol)
            self.line: Line2 | None = None
        except CollinearPoints:
            self.circle = None
            self.line = Line2.through(p, r)

    def param(self, x: Point2) -> float:
        if self.circle is not None:
            w = x - self.circle.center
            return math.atan2(w.y, w.x)
        return self.line.parameter_of(x)

    def point(self, t: float) -> Point2:
        if self.circle is not None:
            return self.circle.center + Point2(math.cos(t), math.sin(t)) * self.circle.radius
        return self.line.point_at(t)

    def fd_step(self, scale: float) -> float:
        return FD_STEP if self.circle is not None else FD_STEP * scale


@dataclass
class InvariantLevel:
    start: Pattern22
    quartic: MiquelQuartic | None
    b_locus: _Locus
    d_locus: _Locus


def invariant_level(S: Pattern22, tol: float = DEFAULT_TOL) -> InvariantLevel:
    try:
        q = quartic_of_pattern(S, tol)
    except MiquelError:
        q = None
    return InvariantLevel(S, q, _Locus(S.A, S.B, S.C, tol), _Locus(S.A, S.D, S.G, tol))


def _project_E(q: MiquelQuartic, E: Point2) -> Point2:
    e = q.to_frame(E)
    for _ in range(3):
        g = q.gradient(e)
        n2 = g.norm2()
        if n2 == 0.0:
            break
        e = e - g * (q.F(e) / n2)
    return q.to_world(e)


def project_to_level(T: Pattern22, level: InvariantLevel, tol: float = DEFAULT_TOL) -> Pattern22:
    """The pattern on the level set closest in shape to T; raises if Newton stalls."""
    S = level.start
    A, C, G = S.A, S.C, S.G
    u, v = C - A, G - A
    E = _project_E(level.quartic, T.E) if level.quartic is not None else T.E
    lb, ld = level.b_locus, level.d_locus

    def residual(x):
        B, D = lb.point(x[0]), ld.point(x[1])
        return np.array([concyclicity_residual(A, B, E, D), concyclicity_residual(B, C, D + u, E)])

    x = np.array([lb.param(T.B), ld.param(T.D)])
    hb, hd = lb.fd_step(S.scale), ld.fd_step(S.scale)
    r = residual(x)
    for _ in range(NEWTON_ITERS):
        if np.max(np.abs(r)) <= RESIDUAL_TOL * 1e-3:
            break
        J = np.column_stack(
            [
                (residual(x + [hb, 0.0]) - residual(x - [hb, 0.0])) / (2 * hb),
                (residual(x + [0.0, hd]) - residual(x - [0.0, hd])) / (2 * hd),
            ]
        )
        x = x - np.linalg.lstsq(J, r, rcond=None)[0]
        r = residual(x)
    if not np.max(np.abs(r)) <= RESIDUAL_TOL:
        raise SolverFailure(f"projection did not converge (residual {np.max(np.abs(r)):.2e})")
    B, D = lb.point(x[0]), ld.point(x[1])
    pts = {"A": A, "B": B, "C": C, "D": D, "E": E, "F": D + u, "G": G, "H": B + v, "I": C + v}
    return from_points(pts, tol)


@dataclass(frozen=True)
class StepResult:
    pattern: Pattern22  # projected, or the raw step when projection failed
    raw: Pattern22
    projected: bool

    @property
    def shift(self) -> float:
        """Largest vertex displacement made by the projection."""
        return max(distance(p, r) for p, r in zip(self.pattern.points().values(), self.raw.points().values()))


def conserving_step(T: Pattern22, level: InvariantLevel, tol: float = DEFAULT_TOL, reverse: bool = False) -> StepResult:
    """One Miquel step followed by projection onto the level set."""
    raw = miquel_step(T, tol, reverse=reverse)
    try:
        return StepResult(project_to_level(raw, level, tol), raw, True)
    except MiquelError:
        return StepResult(raw, raw, False)
