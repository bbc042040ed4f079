"""(2,2)-biperiodic square-grid circle patterns and Miquel mutations.

Vertices of the fundamental domain are labeled row by row::

    A B C        S(0,0) S(1,0) S(2,0)
    D E F   =    S(0,1) S(1,1) S(2,1)
    G H I        S(0,2) S(1,2) S(2,2)

Face (i, j) has corners S(i,j), S(i+1,j), S(i,j+1), S(i+1,j+1); faces with
i+j even are black (ABED, EFIH), the others white (BCFE, DEHG).
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from dataclasses import dataclass, fields
from itertools import combinations

import numpy as np

from .errors import (
    AmbiguousClass,
    CoincidentCenters,
    CollinearMonodromies,
    CollinearPoints,
    DegenerateFace,
    DegenerateFaceCircle,
    DegenerateInput,
    FitFailure,
    InvalidInput,
    NonConcyclicFace,
    NotOnCommonHyperbola,
    PeriodicityViolation,
)
from .geometry import (
    DEFAULT_TOL,
    Line2,
    Point2,
    circumcenter,
    collinear,
    concyclicity_residual,
    distance,
    reflect_point,
    scale_of,
    signed_angle,
)

LABELS = "ABCDEFGHI"
FACES = {
    (0, 0): "ABED",
    (1, 0): "BCFE",
    (0, 1): "DEHG",
    (1, 1): "EFIH",
}
BLACK_FACES = ("ABED", "EFIH")
WHITE_FACES = ("BCFE", "DEHG")

# fit residual bound, in coordinates normalized by the pattern scale
HYPERBOLA_TOL = 1e-7
# mutated faces are concyclic by construction; only rounding is being screened
DERIVED_CYCLIC_TOL = 1e-6


class Color(enum.Enum):
    WHITE = "white"
    BLACK = "black"


class PatternClass(enum.Enum):
    GENERIC = "generic"
    TRAPEZOIDAL_HORIZONTAL = "trapezoidal-horizontal"
    TRAPEZOIDAL_VERTICAL = "trapezoidal-vertical"


class HyperbolaKind(enum.Enum):
    NON_DEGENERATE = "non-degenerate"
    DEGENERATE_ORTHOGONAL_LINES = "degenerate-orthogonal-lines"


def label_of(i: int, j: int) -> str:
    return LABELS[3 * j + i]


@dataclass(frozen=True)
class Pattern22:
    """Nine labeled vertices of a (2,2)-biperiodic pattern.

    Construction validates periodicity closure, non-collinear monodromies,
    distinct face vertices and concyclic faces.
    """

    A: Point2
    B: Point2
    C: Point2
    D: Point2
    E: Point2
    F: Point2
    G: Point2
    H: Point2
    I: Point2  # noqa: E741

    def __post_init__(self):
        validate(self)

    @property
    def u(self) -> Point2:
        return self.C - self.A

    @property
    def v(self) -> Point2:
        return self.G - self.A

    @property
    def scale(self) -> float:
        return scale_of(*self.points().values())

    def points(self) -> dict[str, Point2]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def at(self, i: int, j: int) -> Point2:
        return getattr(self, label_of(i, j))

    def translated(self, t: Point2) -> Pattern22:
        return Pattern22(*(p + t for p in self.points().values()))

    def transposed(self) -> Pattern22:
        """Swap the lattice directions: S'(i,j) = S(j,i)."""
        return Pattern22(*(self.at(j, i) for j in range(3) for i in range(3)))


def validate(S: Pattern22, tol: float = DEFAULT_TOL, cyclic_tol: float | None = None) -> None:
    cyclic_tol = tol if cyclic_tol is None else cyclic_tol
    pts = S.points()
    scale = scale_of(*pts.values())
    u = pts["C"] - pts["A"]
    v = pts["G"] - pts["A"]
    closures = [
        (pts["I"] - pts["G"], u),
        (pts["F"] - pts["D"], u),
        (pts["I"] - pts["C"], v),
        (pts["H"] - pts["B"], v),
    ]
    for got, want in closures:
        if distance(got, want) > tol * scale:
            raise PeriodicityViolation(
                f"periodicity closure broken by {distance(got, want):.3e} (scale {scale:.3e})"
            )
    if abs(u.cross(v)) <= tol * scale * scale:
        raise CollinearMonodromies("monodromies u and v are collinear")
    for name in FACES.values():
        quad = [pts[k] for k in name]
        for (ka, p), (kb, q) in combinations(zip(name, quad), 2):
            if distance(p, q) <= tol * scale:
                raise DegenerateFace(f"face {name}: vertices {ka} and {kb} coincide")
        if all(collinear(*tri, tol=tol) for tri in combinations(quad, 3)):
            raise DegenerateFace(f"face {name} is collinear")
        res = concyclicity_residual(*quad)
        if abs(res) > cyclic_tol:
            raise NonConcyclicFace(f"face {name} not concyclic (residual {res:.3e})")


def from_points(nine, tol: float = DEFAULT_TOL, cyclic_tol: float | None = None) -> Pattern22:
    """Build a pattern from nine points, given as a sequence A..I or a mapping."""
    if isinstance(nine, dict):
        nine = [nine[k] for k in LABELS]
    pts = [p if isinstance(p, Point2) else Point2(*map(float, p)) for p in nine]
    if len(pts) != 9:
        raise InvalidInput(f"expected 9 points, got {len(pts)}")
    S = object.__new__(Pattern22)
    for k, p in zip(LABELS, pts):
        object.__setattr__(S, k, p)
    validate(S, tol, cyclic_tol)
    return S


# -- similarities -------------------------------------------------------------


@dataclass(frozen=True)
class Similarity:
    """Direct similarity z -> scaling * exp(i rotation) * z + translation."""

    rotation: float = 0.0
    scaling: float = 1.0
    translation: Point2 = Point2(0.0, 0.0)

    def __post_init__(self):
        if not self.scaling > 0.0:
            raise InvalidInput("similarity scaling must be positive")

    def __call__(self, p: Point2) -> Point2:
        c = math.cos(self.rotation) * self.scaling
        s = math.sin(self.rotation) * self.scaling
        return Point2(c * p.x - s * p.y + self.translation.x, s * p.x + c * p.y + self.translation.y)


IDENTITY = Similarity()


# -- equilateral hyperbola --------------------------------------------------------


@dataclass(frozen=True)
class HyperbolaSpec:
    """Conic q_xx x^2 + q_xy xy + q_yy y^2 + q_x x + q_y y + q_0 = 0 with q_yy = -q_xx."""

    kind: HyperbolaKind
    coefficients: tuple[float, float, float, float, float, float]
    marked: dict
    residual: float

    def __call__(self, p: Point2) -> float:
        qxx, qxy, qyy, qx, qy, q0 = self.coefficients
        return qxx * p.x * p.x + qxy * p.x * p.y + qyy * p.y * p.y + qx * p.x + qy * p.y + q0


def _fit_equilateral(points: list[Point2]):
    """Unit-norm null vector of the 5x5 system, in centroid/scale normalized coordinates."""
    scale = scale_of(*points)
    cx = sum(p.x for p in points) / len(points)
    cy = sum(p.y for p in points) / len(points)
    rows = []
    for p in points:
        X = (p.x - cx) / scale
        Y = (p.y - cy) / scale
        rows.append([X * X - Y * Y, X * Y, X, Y, 1.0])
    M = np.array(rows)
    _, _, vt = np.linalg.svd(M)
    w = vt[-1]
    residual = float(np.max(np.abs(M @ w)))
    return w, residual, (cx, cy, scale)


def _conic_det(w) -> float:
    A, B, C, D, E = w
    Q = np.array([[A, B / 2, C / 2], [B / 2, -A, D / 2], [C / 2, D / 2, E]])
    return float(np.linalg.det(Q))


def _world_coefficients(w, cx, cy, sigma):
    A, B, C, D, E = w
    qx = -2 * A * cx - B * cy + C * sigma
    qy = 2 * A * cy - B * cx + D * sigma
    q0 = A * (cx * cx - cy * cy) + B * cx * cy - C * sigma * cx - D * sigma * cy + E * sigma * sigma
    q = np.array([A, B, -A, qx, qy, q0])
    q /= np.linalg.norm(q)
    return tuple(float(t) for t in q)


def fit_equilateral_hyperbola(S: Pattern22, degenerate_tol: float = 1e-8) -> HyperbolaSpec:
    marked = {k: getattr(S, k) for k in "BDEFH"}
    w, residual, (cx, cy, sigma) = _fit_equilateral(list(marked.values()))
    if residual > HYPERBOLA_TOL:
        raise FitFailure(f"equilateral hyperbola fit residual {residual:.3e}")
    kind = (
        HyperbolaKind.DEGENERATE_ORTHOGONAL_LINES
        if abs(_conic_det(w)) <= degenerate_tol
        else HyperbolaKind.NON_DEGENERATE
    )
    return HyperbolaSpec(kind, _world_coefficients(w, cx, cy, sigma), marked, residual)


# -- construction from five points ------------------------------------------------------


def _exact_circumcenter(p1, p2, p3):
    bx, by = p2[0] - p1[0], p2[1] - p1[1]
    cx, cy = p3[0] - p1[0], p3[1] - p1[1]
    d = 2 * (bx * cy - by * cx)
    if d == 0:
        raise CollinearPoints("collinear points in reconstruction")
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    return (p1[0] + (cy * b2 - by * c2) / d, p1[1] + (bx * c2 - cx * b2) / d)


def _exact_reflect(p, a, b):
    dx, dy = b[0] - a[0], b[1] - a[1]
    wx, wy = p[0] - a[0], p[1] - a[1]
    t = 2 * (wx * dx + wy * dy) / (dx * dx + dy * dy)
    return (a[0] + t * dx - wx, a[1] + t * dy - wy)


def reconstruct_from_five(
    B: Point2, D: Point2, E: Point2, F: Point2, H: Point2, tol: float = DEFAULT_TOL
) -> Pattern22:
    """Rebuild the pattern whose B, D, E, F, H lie on an equilateral hyperbola.

    A is the reflection of B through the line joining the centers of the
    circles BDE and (DEH shifted by H->B); C, G, I follow by periodicity.
    Every step is a rational map, so it is evaluated in exact arithmetic on
    the binary values of the inputs and rounded once.
    """
    _, residual, _ = _fit_equilateral([B, D, E, F, H])
    if residual > HYPERBOLA_TOL:
        raise NotOnCommonHyperbola(f"five points off a common equilateral hyperbola ({residual:.3e})")
    exact = [(Fraction(p.x), Fraction(p.y)) for p in (B, D, E, F, H)]
    return _reconstruct_exact(*exact, tol=tol)


def _reconstruct_exact(b, d, e, f, h, tol=DEFAULT_TOL) -> Pattern22:
    o1 = _exact_circumcenter(b, d, e)
    o2 = _exact_circumcenter(d, e, h)
    o2_shifted = (o2[0] + b[0] - h[0], o2[1] + b[1] - h[1])
    if o1 == o2_shifted:
        raise CoincidentCenters("circle centers for A coincide")
    a = _exact_reflect(b, o1, o2_shifted)
    u = (f[0] - d[0], f[1] - d[1])
    v = (h[0] - b[0], h[1] - b[1])
    nine = [
        a, b, (a[0] + u[0], a[1] + u[1]),
        d, e, f,
        (a[0] + v[0], a[1] + v[1]), h, (a[0] + u[0] + v[0], a[1] + u[1] + v[1]),
    ]
    return from_points([Point2(float(x), float(y)) for x, y in nine], tol)


def _check_abscissas(values):
    for t in values:
        if not math.isfinite(t) or t == 0.0:
            raise InvalidInput(f"abscissa must be finite and nonzero, got {t}")
    for s, t in combinations(values, 2):
        if s == t:
            raise InvalidInput("duplicate abscissa")


def from_hyperbola(abscissas, similarity: Similarity = IDENTITY) -> Pattern22:
    """Pattern with B, D, E, F, H at the given abscissas on xy = 1, then moved by a similarity."""
    values = [float(t) for t in abscissas]
    if len(values) != 5:
        raise InvalidInput("need five abscissas b, d, e, f, h")
    _check_abscissas(values)
    S = _reconstruct_exact(*((Fraction(t), 1 / Fraction(t)) for t in values))
    if similarity == IDENTITY:
        return S
    return Pattern22(*(similarity(p) for p in S.points().values()))


def from_trapezoid(
    dx: float,
    ex: float,
    fx: float,
    by: float,
    hy: float,
    similarity: Similarity = IDENTITY,
    vertical: bool = False,
) -> Pattern22:
    """Horizontal trapezoidal pattern from D, E, F on y = 0 and B, H on x = 0.

    With ``vertical`` the lattice is transposed, giving a vertical trapezoidal pattern.
    """
    for t in (dx, ex, fx, by, hy):
        if not math.isfinite(t) or t == 0.0:
            raise InvalidInput("trapezoid coordinates must be finite and nonzero")
    if len({dx, ex, fx}) < 3 or by == hy:
        raise InvalidInput("duplicate coordinate")
    S = reconstruct_from_five(
        Point2(0.0, by), Point2(dx, 0.0), Point2(ex, 0.0), Point2(fx, 0.0), Point2(0.0, hy)
    )
    if vertical:
        S = S.transposed()
    return Pattern22(*(similarity(p) for p in S.points().values()))


# -- classification ------------------------------------------------------------------


def classify(S: Pattern22, tol: float = DEFAULT_TOL) -> PatternClass:
    rows = [collinear(S.at(0, j), S.at(1, j), S.at(2, j), tol) for j in range(3)]
    cols = [collinear(S.at(i, 0), S.at(i, 1), S.at(i, 2), tol) for i in range(3)]
    horizontal = all(rows)
    vertical = all(cols)
    if horizontal and vertical:
        raise AmbiguousClass("pattern is both horizontally and vertically trapezoidal")
    if horizontal:
        return PatternClass.TRAPEZOIDAL_HORIZONTAL
    if vertical:
        return PatternClass.TRAPEZOIDAL_VERTICAL
    if any(rows) or any(cols):
        raise AmbiguousClass("only some vertex triples are collinear")
    return PatternClass.GENERIC


# -- mutations ----------------------------------------------------------------------


def _face_center(quad: list[Point2], tol: float) -> Point2:
    # use the best-conditioned triple of the four concyclic points
    best = max(combinations(quad, 3), key=lambda t: abs((t[1] - t[0]).cross(t[2] - t[0])))
    try:
        return circumcenter(*best, tol=tol)
    except CollinearPoints as exc:
        raise DegenerateFaceCircle(str(exc)) from exc


def face_centers(S: Pattern22, tol: float = DEFAULT_TOL) -> dict[tuple[int, int], Point2]:
    """Circumcenters O(i,j) of the four faces of the fundamental domain."""
    pts = S.points()
    return {ij: _face_center([pts[k] for k in name], tol) for ij, name in FACES.items()}


def mutate(S: Pattern22, color: Color, tol: float = DEFAULT_TOL) -> Pattern22:
    centers = face_centers(S, tol)
    u, v = S.u, S.v
    scale = S.scale

    def center(i, j):
        di, dj = i % 2, j % 2
        return centers[(di, dj)] + u * ((i - di) // 2) + v * ((j - dj) // 2)

    out = []
    for j in range(3):
        for i in range(3):
            diagonal = ((i + j) % 2 == 0) == (color is Color.WHITE)
            if diagonal:
                o1, o2 = center(i, j), center(i - 1, j - 1)
            else:
                o1, o2 = center(i - 1, j), center(i, j - 1)
            if distance(o1, o2) <= tol * scale:
                raise CoincidentCenters(f"reflection line undefined at {label_of(i, j)}")
            out.append(reflect_point(S.at(i, j), Line2.through(o1, o2)))
    return _project(out, tol)


def _snap_to_equilateral(points: list[Point2]) -> list[Point2]:
    """One Newton step per point onto the best-fit equilateral hyperbola."""
    w, _, (cx, cy, sigma) = _fit_equilateral(points)
    A, B, C, D, E = w
    out = []
    for p in points:
        X, Y = (p.x - cx) / sigma, (p.y - cy) / sigma
        f = A * (X * X - Y * Y) + B * X * Y + C * X + D * Y + E
        gx = 2 * A * X + B * Y + C
        gy = -2 * A * Y + B * X + D
        g2 = gx * gx + gy * gy
        if g2 > 1e-12:
            X, Y = X - f * gx / g2, Y - f * gy / g2
        out.append(Point2(cx + sigma * X, cy + sigma * Y))
    return out


def _project(nine: list[Point2], tol: float) -> Pattern22:
    """Snap a numerically computed pattern back onto the exact constraint set.

    The reflection map amplifies any departure from concyclicity by a factor of
    a few per step, so orbits are rebuilt from B, D, E, F, H exactly and only
    the final rounding survives.
    """
    five = _snap_to_equilateral([nine[k] for k in (1, 3, 4, 5, 7)])
    T = _reconstruct_exact(*((Fraction(p.x), Fraction(p.y)) for p in five), tol=tol)
    drift = distance(T.A, nine[0])
    if drift > max(tol, DERIVED_CYCLIC_TOL) * T.scale:
        raise NonConcyclicFace(f"mutated pattern is off the constraint set by {drift:.3e}")
    return T


def mutate_renormalized(S: Pattern22, color: Color, tol: float = DEFAULT_TOL) -> Pattern22:
    T = mutate(S, color, tol)
    shift = S.A - T.A
    pts = [p + shift for p in T.points().values()]
    pts[0] = S.A
    return from_points(pts, tol)


def miquel_step(S: Pattern22, tol: float = DEFAULT_TOL, reverse: bool = False) -> Pattern22:
    """One step of renormalized Miquel dynamics: white then black, or black then white."""
    first, second = (Color.BLACK, Color.WHITE) if reverse else (Color.WHITE, Color.BLACK)
    return mutate_renormalized(mutate_renormalized(S, first, tol), second, tol)


@dataclass(frozen=True)
class ConservedQuantities:
    A: Point2
    C: Point2
    G: Point2
    I: Point2  # noqa: E741
    angle_CBA: float
    angle_ADG: float


def conserved_quantities(S: Pattern22) -> ConservedQuantities:
    cba = signed_angle(S.B, S.C, S.A)
    adg = signed_angle(S.D, S.A, S.G)
    return ConservedQuantities(S.A, S.C, S.G, S.I, cba, adg)


# -- random patterns ------------------------------------------------------------------


def random_similarity(rng: np.random.Generator) -> Similarity:
    return Similarity(
        rotation=float(rng.uniform(0.0, 2.0 * math.pi)),
        scaling=float(rng.uniform(0.5, 2.0)),
        translation=Point2(*(float(t) for t in rng.uniform(-5.0, 5.0, 2))),
    )


def _spread_ok(values, gap):
    return min(abs(s - t) for s, t in combinations(values, 2)) >= gap


def random_generic(rng: np.random.Generator, similarity: bool = True, max_tries: int = 1000) -> Pattern22:
    """Abscissas uniform on [-5,-0.2] u [0.2,5], rejecting near-duplicates and invalid patterns."""
    for _ in range(max_tries):
        values = rng.uniform(0.2, 5.0, 5) * rng.choice([-1.0, 1.0], 5)
        if not _spread_ok(values, 0.05):
            continue
        sim = random_similarity(rng) if similarity else IDENTITY
        try:
            S = from_hyperbola(values, sim)
            if classify(S) is PatternClass.GENERIC:
                return S
        except (InvalidInput, CollinearPoints, CoincidentCenters, DegenerateInput, AmbiguousClass):
            continue
    raise InvalidInput("could not draw a valid generic pattern")


def random_trapezoidal(
    rng: np.random.Generator, vertical: bool = False, similarity: bool = True, max_tries: int = 1000
) -> Pattern22:
    target = PatternClass.TRAPEZOIDAL_VERTICAL if vertical else PatternClass.TRAPEZOIDAL_HORIZONTAL
    for _ in range(max_tries):
        xs = rng.uniform(0.2, 3.0, 3) * rng.choice([-1.0, 1.0], 3)
        ys = rng.uniform(0.2, 3.0, 2) * rng.choice([-1.0, 1.0], 2)
        if not (_spread_ok(xs, 0.1) and _spread_ok(ys, 0.1)):
            continue
        sim = random_similarity(rng) if similarity else IDENTITY
        try:
            S = from_trapezoid(*xs, *ys, similarity=sim, vertical=vertical)
            # keep away from the degenerate A = B type configurations
            if min(distance(p, q) for p, q in combinations(S.points().values(), 2)) < 0.05 * S.scale:
                continue
            if classify(S) is target:
                return S
        except (InvalidInput, CollinearPoints, CoincidentCenters, DegenerateInput, AmbiguousClass):
            continue
    raise InvalidInput("could not draw a valid trapezoidal pattern")
