"""JSON file formats: patterns, quartic reports, orbit records."""

from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import FileFailure, InvalidInput
from .geometry import DEFAULT_TOL, Point2
from .pattern import LABELS, ConservedQuantities, Pattern22, from_points
from .quartic import MiquelQuartic, is_nondegenerate

PATTERN_FORMAT = "miquel-pattern/1"
ORBIT_FORMAT = "miquel-orbit/1"


def _xy(p: Point2) -> list[float]:
    # float repr is the shortest string that round-trips, never more than 17 digits
    return [p.x, p.y]


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False) + "\n"


def write_text(path: str | Path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise FileFailure(f"cannot write {path}: {exc.strerror}") from exc


def read_json(path: str | Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileFailure(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFailure(f"{path} is not valid JSON: {exc.msg}") from exc


# -- patterns --------------------------------------------------------------------------


def pattern_to_dict(S: Pattern22) -> dict:
    return {"format": PATTERN_FORMAT, "points": {k: _xy(p) for k, p in S.points().items()}}


def _points_from(raw) -> dict[str, Point2]:
    if not isinstance(raw, dict) or set(raw) != set(LABELS):
        raise InvalidInput("points must map each of A..I to [x, y]")
    out = {}
    for k in LABELS:
        v = raw[k]
        if (
            not isinstance(v, list)
            or len(v) != 2
            or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v)
            or not all(math.isfinite(t) for t in v)
        ):
            raise InvalidInput(f"point {k} must be a pair of finite numbers")
        out[k] = Point2(*v)
    return out


def pattern_from_dict(data, tol: float = DEFAULT_TOL) -> Pattern22:
    if not isinstance(data, dict) or data.get("format") != PATTERN_FORMAT:
        raise InvalidInput(f"expected a {PATTERN_FORMAT} document")
    return from_points(_points_from(data.get("points")), tol)


def write_pattern(path: str | Path, S: Pattern22) -> None:
    write_text(path, dumps(pattern_to_dict(S)))


def read_pattern(path: str | Path, tol: float = DEFAULT_TOL) -> Pattern22:
    return pattern_from_dict(read_json(path), tol)


def read_pattern_or_orbit(path: str | Path, tol: float = DEFAULT_TOL) -> tuple[Pattern22, list[Pattern22]]:
    """A pattern file gives (S, []); an orbit file gives (step 0, all recorded steps)."""
    data = read_json(path)
    if isinstance(data, dict) and data.get("format") == ORBIT_FORMAT:
        steps = data.get("steps")
        if not isinstance(steps, list) or not steps:
            raise InvalidInput("orbit file has no steps")
        # recorded steps were validated when written; re-check the file is intact
        orbit = [from_points(_points_from(e.get("points") if isinstance(e, dict) else None), tol) for e in steps]
        return orbit[0], orbit
    return pattern_from_dict(data, tol), []


# -- reports ---------------------------------------------------------------------------


def quartic_to_dict(q: MiquelQuartic) -> dict:
    return {
        "a": q.a,
        "b": q.b,
        "c": q.c,
        "omega": _xy(q.origin),
        "axis": _xy(q.axis),
        "nondegenerate": is_nondegenerate(q),
    }


def conserved_to_dict(c: ConservedQuantities) -> dict:
    return {
        "A": _xy(c.A),
        "C": _xy(c.C),
        "G": _xy(c.G),
        "I": _xy(c.I),
        "angle_CBA": c.angle_CBA,
        "angle_ADG": c.angle_ADG,
    }
