"""Numerical cross-checks of the dynamics against the group law, for one pattern.

Distances are reported divided by the pattern scale.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .errors import SolverError
from .geometry import DEFAULT_TOL, distance
from .group_law import (
    GroupPoint,
    add,
    base_point_sum_invariance,
    double,
    lift,
    negate,
    neutral,
    random_curve_point,
    predict_mutation,
    require_nondegenerate,
    tangent_circle_center,
    tangent_circle_mutation,
)
from .pattern import Color, Pattern22, mutate_renormalized
from .quartic import MiquelQuartic, quartic_of_pattern, x_axis_points

TRIANGLE_TOL = 1e-7
AXIOM_TOL = 1e-6
SUM_TOL = 1e-6


def mutation_triangle(S: Pattern22, color: Color, q: MiquelQuartic, tol: float = DEFAULT_TOL) -> float:
    """Largest pairwise gap among three computations of E after one renormalized mutation."""
    direct = mutate_renormalized(S, color, tol).E
    tangent = tangent_circle_mutation(S, q, tol, color)
    law = predict_mutation(S, color, q)
    return max(distance(p, r) for p, r in combinations((direct, tangent, law), 2)) / S.scale


def tangency_residual(S: Pattern22, q: MiquelQuartic, tol: float = DEFAULT_TOL) -> float:
    """The circle tangent at A through E passes through the white image of E; likewise C for black."""
    worst = 0.0
    for color, V in ((Color.WHITE, S.A), (Color.BLACK, S.C)):
        moved = mutate_renormalized(S, color, tol).E
        o = tangent_circle_center(q, V, S.E, tol)
        worst = max(worst, abs(distance(o, moved) - distance(o, V)))
    return worst / S.scale


def group_axiom_residuals(q: MiquelQuartic, rng: np.random.Generator, trials: int = 20) -> tuple[dict, int]:
    """Worst residuals of the group axioms on random real points, in units of the curve extent."""
    require_nondegenerate(q)
    unit = q.extent
    N = neutral(q)
    worst = {"identity": 0.0, "inverse": 0.0, "commutativity": 0.0, "associativity": 0.0, "two_torsion": 0.0}
    skipped = 0
    for T in x_axis_points(q):
        worst["two_torsion"] = max(worst["two_torsion"], double(q, GroupPoint(q, T.x, T.y)).distance(N) / unit)
    for _ in range(trials):
        P1, P2, P3 = (random_curve_point(q, rng) for _ in range(3))
        try:
            left = add(q, add(q, P1, P2), P3)
            right = add(q, P1, add(q, P2, P3))
            checks = {
                "identity": add(q, P1, N).distance(P1),
                "inverse": add(q, P1, negate(q, P1)).distance(N),
                "commutativity": add(q, P1, P2).distance(add(q, P2, P1)),
                "associativity": left.distance(right),
            }
        except SolverError:
            skipped += 1
            continue
        for k, v in checks.items():
            worst[k] = max(worst[k], v / unit)
    return worst, skipped


def verify_pattern(S: Pattern22, rng: np.random.Generator, trials: int = 20, tol: float = DEFAULT_TOL) -> dict:
    """Run every check; raises NotNondegenerate when the group law is unavailable."""
    q = quartic_of_pattern(S, tol)
    require_nondegenerate(q)
    white = mutation_triangle(S, Color.WHITE, q, tol)
    black = mutation_triangle(S, Color.BLACK, q, tol)
    tangency = tangency_residual(S, q, tol)
    axioms, skipped = group_axiom_residuals(q, rng, trials)
    sums = base_point_sum_invariance(q, lift(q, S.E), trials, rng)
    axioms["sum_invariance"] = sums["spread"] / q.extent
    skipped += sums["skipped"]
    passed = (
        max(white, black, tangency) <= TRIANGLE_TOL
        and max(v for k, v in axioms.items() if k != "sum_invariance") <= AXIOM_TOL
        and axioms["sum_invariance"] <= SUM_TOL
        and all(math.isfinite(v) for v in axioms.values())
    )
    return {
        "theorem3_residual_white": white,
        "theorem3_residual_black": black,
        "prop5_residual": tangency,
        "group_axiom_residuals": axioms,
        "skipped_trials": skipped,
        "passed": passed,
    }
