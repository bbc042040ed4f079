"""Iterated renormalized Miquel dynamics with per-step drift bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .conserve import conserving_step, invariant_level
from .errors import InvalidInput, MiquelError
from .files import ORBIT_FORMAT, conserved_to_dict, pattern_to_dict
from .geometry import DEFAULT_TOL, distance
from .group_law import predict_orbit
from .pattern import ConservedQuantities, Pattern22, conserved_quantities
from .quartic import MiquelQuartic, is_nondegenerate, quartic_of_pattern


def line_angle_gap(t1: float, t2: float) -> float:
    """Distance between two angles taken modulo pi.

    B (resp. D) moves on the fixed circle ABC (resp. ADG); crossing to the
    other arc flips the ray angle by pi while the line angle is unchanged.
    """
    return abs(math.remainder(t1 - t2, math.pi))


def conserved_drift(c0: ConservedQuantities, c: ConservedQuantities) -> tuple[float, float]:
    """Largest point displacement among A, C, G, I and largest angle change."""
    points = max(distance(getattr(c0, k), getattr(c, k)) for k in "ACGI")
    angles = max(line_angle_gap(c.angle_CBA, c0.angle_CBA), line_angle_gap(c.angle_ADG, c0.angle_ADG))
    return points, angles


def coefficient_drift(q0: MiquelQuartic, q: MiquelQuartic) -> float:
    """Largest coefficient change in units of R^2 (for a, b) and R^4 (for c), R^2 = max(|a|, |b|, |c|^1/2)."""
    r2 = max(abs(q0.a), abs(q0.b), abs(q0.c) ** 0.5)
    return max(abs(q.a - q0.a) / r2, abs(q.b - q0.b) / r2, abs(q.c - q0.c) / (r2 * r2))


def membership_residual(q: MiquelQuartic, world) -> float:
    """|F| relative to the magnitude of its terms, a scale-free membership measure."""
    p = q.to_frame(world)
    return abs(q.F(p)) / q.term_magnitude(p)


@dataclass
class OrbitRecord:
    patterns: list[Pattern22]
    entries: list[dict]
    summary: dict
    error: dict | None = field(default=None)

    def to_dict(self) -> dict:
        out = {"format": ORBIT_FORMAT, "steps": self.entries, "summary": self.summary}
        if self.error is not None:
            out["error"] = self.error
        return out


def run_orbit(S: Pattern22, steps: int, tol: float = DEFAULT_TOL) -> OrbitRecord:
    """Iterate white-then-black renormalized mutations, stopping at the first hard error.

    Each step is projected back onto the level set of the conserved quantities.
    Conservation and coefficient residuals are measured on the raw step, before
    projection, so they still report how well the mutations themselves conserve.
    """
    if steps <= 0:
        raise InvalidInput("steps must be positive")
    q0 = quartic_of_pattern(S, tol)
    c0 = conserved_quantities(S)
    predictable = is_nondegenerate(q0)
    scale = S.scale
    patterns: list[Pattern22] = []
    entries: list[dict] = []
    worst = {"conserved_points": 0.0, "conserved_angles": 0.0, "coefficients": 0.0, "prediction": 0.0, "projection": 0.0}
    error = None
    T = S
    raw = S
    level = invariant_level(S, tol)
    unprojected = 0
    for k in range(steps + 1):
        try:
            shift = 0.0
            if k > 0:
                step = conserving_step(T, level, tol)
                T, raw = step.pattern, step.raw
                shift = step.shift
                unprojected += not step.projected
            q = quartic_of_pattern(raw, tol)
            c = conserved_quantities(T)
            dp, da = conserved_drift(c0, conserved_quantities(raw))
            dq = coefficient_drift(q0, q)
            residuals = {
                "conserved_points": dp,
                "conserved_angles": da,
                "coefficients": dq,
                "membership_E": membership_residual(q0, T.E),
                "projection": shift,
            }
            if predictable:
                residuals["prediction"] = distance(T.E, predict_orbit(S, k, q0))
        except MiquelError as exc:
            error = {"step": k, "error": type(exc).__name__, "message": str(exc)}
            break
        for key in worst:
            if key in residuals:
                worst[key] = max(worst[key], residuals[key])
        patterns.append(T)
        entries.append(
            {
                "step": k,
                "points": pattern_to_dict(T)["points"],
                "quartic": {"a": q.a, "b": q.b, "c": q.c},
                "conserved": conserved_to_dict(c),
                "residuals": residuals,
            }
        )
    summary = {
        "steps_completed": len(entries) - 1,
        "scale": scale,
        "max_conserved_drift": worst["conserved_points"],
        "max_conserved_angle_drift": worst["conserved_angles"],
        "max_coefficient_drift": worst["coefficients"],
        "max_prediction_error": worst["prediction"] if predictable else None,
        "max_projection_shift": worst["projection"],
        "unprojected_steps": unprojected,
    }
    return OrbitRecord(patterns, entries, summary, error)
