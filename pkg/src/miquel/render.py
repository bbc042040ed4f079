"""SVG 1.1 drawings of a pattern, its hyperbola, its quartic and an orbit of E."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import MiquelError
from .geometry import Point2, circumcircle
from .group_law import neutral
from .pattern import BLACK_FACES, FACES, HyperbolaKind, Pattern22, fit_equilateral_hyperbola
from .quartic import foci, quartic_of_pattern, sample_real_curve

LAYERS = ("circles", "points", "hyperbola", "quartic", "foci", "orbit")
BLACK_STROKE = "#1a1a1a"
WHITE_STROKE = "#a0a0a0"


@dataclass
class RenderOptions:
    size: int = 800
    stroke: float = 1.0
    layers: tuple[str, ...] = LAYERS
    samples: int = 600  # per quadrant arc of the quartic


def fmt(v: float) -> str:
    s = f"{v:.6g}"
    return "0" if s == "-0" else s


@dataclass
class _Scene:
    """World-space primitives, collected before the view box is known."""

    circles: list = field(default_factory=list)  # (center, radius, stroke)
    polylines: list = field(default_factory=list)  # (points, stroke, dashed)
    markers: list = field(default_factory=list)  # (point, label, fill)
    skipped: list = field(default_factory=list)
    extent_points: list = field(default_factory=list)


def _hyperbola_polylines(S: Pattern22, reach: float) -> list[list[Point2]]:
    h = fit_equilateral_hyperbola(S)
    qxx, qxy, _, qx, qy, q0 = h.coefficients
    # principal frame: the form is mu (X^2 - Y^2) along e1, e2
    phi = 0.5 * math.atan2(qxy, 2.0 * qxx)
    mu = math.hypot(qxx, 0.5 * qxy)
    e1 = Point2(math.cos(phi), math.sin(phi))
    e2 = e1.perp()
    # center solves 2 M c = -(qx, qy) with M = [[qxx, qxy/2], [qxy/2, -qxx]]
    det = -4.0 * (qxx * qxx + 0.25 * qxy * qxy)
    cx = (-qx * (-2.0 * qxx) + qy * qxy) / det
    cy = (-qy * (2.0 * qxx) + qx * qxy) / det
    center = Point2(cx, cy)
    k = q0 + 0.5 * (qx * cx + qy * cy)
    n = 400
    if h.kind is HyperbolaKind.DEGENERATE_ORTHOGONAL_LINES:
        # X^2 = Y^2: the two diagonals of the principal frame
        d1, d2 = (e1 + e2).unit(), (e1 - e2).unit()
        return [[center - d * reach, center + d * reach] for d in (d1, d2)]
    r2 = -k / mu
    r = math.sqrt(abs(r2))
    T = math.asinh(reach / r)
    ts = [-T + 2.0 * T * i / (n - 1) for i in range(n)]
    out = []
    for sign in (1.0, -1.0):
        if r2 > 0.0:
            pts = [center + e1 * (sign * r * math.cosh(t)) + e2 * (r * math.sinh(t)) for t in ts]
        else:
            pts = [center + e1 * (r * math.sinh(t)) + e2 * (sign * r * math.cosh(t)) for t in ts]
        out.append(pts)
    return out


def _build(S: Pattern22, orbit: list[Pattern22], opts: RenderOptions) -> _Scene:
    scene = _Scene()
    pts = S.points()
    scene.extent_points.extend(pts.values())
    layers = set(opts.layers)

    def attempt(name, fn):
        if name not in layers:
            return
        try:
            fn()
        except (MiquelError, ValueError, ZeroDivisionError, OverflowError) as exc:
            scene.skipped.append(f"{name}: {type(exc).__name__}: {exc}")

    def circles():
        for name in FACES.values():
            c = circumcircle(*(pts[k] for k in name[:3]))
            scene.circles.append((c.center, c.radius, BLACK_STROKE if name in BLACK_FACES else WHITE_STROKE))

    def hyperbola():
        for line in _hyperbola_polylines(S, 2.0 * S.scale):
            scene.polylines.append((line, "#2b6cb0", True))

    q_box = {}

    def quartic():
        q = quartic_of_pattern(S)
        q_box["q"] = q
        for branch in sample_real_curve(q, opts.samples):
            world = [q.to_world(p) for p in branch.points]
            scene.polylines.append((world, "#c53030", False))
            scene.extent_points.extend(world)

    def special():
        q = q_box.get("q") or quartic_of_pattern(S)
        P, P2 = foci(q)
        marks = [(P, "P", "#805ad5"), (P2, "P'", "#805ad5"), (q.origin, "Ω", "#2f855a")]
        try:
            marks.append((neutral(q).world, "N", "#dd6b20"))
        except MiquelError as exc:
            scene.skipped.append(f"neutral: {type(exc).__name__}: {exc}")
        for p, label, fill in marks:
            scene.markers.append((p, label, fill))
            scene.extent_points.append(p)

    def trail():
        if not orbit:
            return
        es = [T.E for T in orbit]
        scene.polylines.append((es, "#718096", True))
        for k, p in enumerate(es):
            scene.markers.append((p, f"E{k}", "#4a5568"))
        scene.extent_points.extend(es)

    attempt("circles", circles)
    attempt("quartic", quartic)
    attempt("hyperbola", hyperbola)
    attempt("foci", special)
    attempt("orbit", trail)
    if "points" in layers:
        for k, p in pts.items():
            scene.markers.append((p, k, "#000000"))
    return scene


def render_svg(S: Pattern22, orbit: list[Pattern22] | None = None, opts: RenderOptions | None = None) -> str:
    opts = opts or RenderOptions()
    scene = _build(S, orbit or [], opts)
    xs = [p.x for p in scene.extent_points]
    ys = [p.y for p in scene.extent_points]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-300)
    margin = 0.05 * span
    x0, x1, y0, y1 = x0 - margin, x1 + margin, y0 - margin, y1 + margin
    k = opts.size / max(x1 - x0, y1 - y0)
    width, height = (x1 - x0) * k, (y1 - y0) * k

    def X(p: Point2) -> str:
        return fmt((p.x - x0) * k)

    def Y(p: Point2) -> str:
        return fmt((y1 - p.y) * k)

    sw = fmt(opts.stroke)
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{fmt(width)}" height="{fmt(height)}" viewBox="0 0 {fmt(width)} {fmt(height)}">',
    ]
    for note in scene.skipped:
        out.append(f"<!-- skipped {note.replace('--', '- -')} -->")
    out.append(f'<rect x="0" y="0" width="{fmt(width)}" height="{fmt(height)}" fill="#ffffff"/>')
    out.append('<g id="circles" fill="none">')
    for center, radius, stroke in scene.circles:
        out.append(
            f'<circle cx="{X(center)}" cy="{Y(center)}" r="{fmt(radius * k)}" stroke="{stroke}" stroke-width="{sw}"/>'
        )
    out.append("</g>")
    out.append('<g id="curves" fill="none">')
    for points, stroke, dashed in scene.polylines:
        coords = " ".join(f"{X(p)},{Y(p)}" for p in points)
        dash = f' stroke-dasharray="{fmt(4 * opts.stroke)},{fmt(3 * opts.stroke)}"' if dashed else ""
        out.append(f'<polyline points="{coords}" stroke="{stroke}" stroke-width="{sw}"{dash}/>')
    out.append("</g>")
    out.append('<g id="points" font-family="sans-serif" font-size="12">')
    r = fmt(2.5 * opts.stroke)
    for p, label, fill in scene.markers:
        out.append(f'<circle cx="{X(p)}" cy="{Y(p)}" r="{r}" fill="{fill}"/>')
        out.append(f'<text x="{fmt((p.x - x0) * k + 4)}" y="{fmt((y1 - p.y) * k - 4)}" fill="{fill}">{label}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
