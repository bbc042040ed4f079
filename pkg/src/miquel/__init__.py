"""Miquel dynamics on (2,2)-biperiodic circle patterns and the group law on Miquel quartics."""

from .errors import MiquelError
from .geometry import Circle2, Line2, Point2
from .group_law import GroupPoint, add, double, lift, mul, negate, neutral, predict_mutation, predict_orbit
from .measure import arc_measure, omega_integrand, orbit_measure_report
from .pattern import (
    Color,
    Pattern22,
    PatternClass,
    classify,
    conserved_quantities,
    from_hyperbola,
    from_points,
    from_trapezoid,
    miquel_step,
    mutate,
    mutate_renormalized,
    reconstruct_from_five,
)
from .quartic import MiquelQuartic, is_nondegenerate, quartic_of_pattern

__version__ = "0.1.0"

__all__ = [
    "Circle2",
    "Color",
    "GroupPoint",
    "Line2",
    "MiquelError",
    "MiquelQuartic",
    "Pattern22",
    "PatternClass",
    "Point2",
    "add",
    "arc_measure",
    "classify",
    "conserved_quantities",
    "double",
    "from_hyperbola",
    "from_points",
    "from_trapezoid",
    "is_nondegenerate",
    "lift",
    "miquel_step",
    "mul",
    "mutate",
    "mutate_renormalized",
    "negate",
    "neutral",
    "omega_integrand",
    "orbit_measure_report",
    "predict_mutation",
    "predict_orbit",
    "quartic_of_pattern",
    "reconstruct_from_five",
]
