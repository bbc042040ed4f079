import json
import math
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from conftest import generic_patterns

from miquel import files
from miquel.cli import main
from miquel.errors import FileFailure, InvalidInput
from miquel.geometry import Point2, distance
from miquel.pattern import LABELS, from_hyperbola, from_trapezoid, miquel_step
from miquel.quartic import is_on_curve, quartic_of_pattern
from miquel.render import RenderOptions, _build, render_svg

# a = b exactly: D,E,F on y = 0 and B,H on x = 0 chosen so both coefficients coincide
DEGENERATE_TRAPEZOID = (-2.1, 0.7, 1.9, 1.3, 399 / 130)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def pattern_file(tmp_path):
    path = tmp_path / "s.json"
    (S,) = generic_patterns(70, 1, nondegenerate=True)
    files.write_pattern(path, S)
    return path


class TestFiles:
    def test_round_trip_is_lossless(self, tmp_path):
        for S in generic_patterns(71, 10):
            files.write_pattern(tmp_path / "p.json", S)
            T = files.read_pattern(tmp_path / "p.json")
            assert T.points() == S.points()

    def test_schema(self, tmp_path):
        S = from_hyperbola((1, 2, 3, 4, 6))
        files.write_pattern(tmp_path / "p.json", S)
        data = json.loads((tmp_path / "p.json").read_text())
        assert data["format"] == files.PATTERN_FORMAT
        assert list(data["points"]) == list(LABELS)
        assert data["points"]["A"] == [6, 1.8333333333333333]

    def test_bad_documents(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(FileFailure):
            files.read_pattern(bad)
        bad.write_text(json.dumps({"format": "other"}))
        with pytest.raises(InvalidInput):
            files.read_pattern(bad)
        doc = files.pattern_to_dict(from_hyperbola((1, 2, 3, 4, 6)))
        doc["points"]["E"] = ["x", 1]
        bad.write_text(json.dumps(doc))
        with pytest.raises(InvalidInput):
            files.read_pattern(bad)

    def test_quartic_schema(self):
        d = files.quartic_to_dict(quartic_of_pattern(from_hyperbola((1, 2, 3, 4, 6))))
        assert set(d) == {"a", "b", "c", "omega", "axis", "nondegenerate"}
        assert d["omega"] == pytest.approx([9.5, 31 / 24], rel=1e-12)


class TestGenerate:
    def test_abscissas(self, tmp_path, capsys):
        out = tmp_path / "s.json"
        code, stdout, _ = run(capsys, "generate", "--abscissas", "1,2,3,4,6", "-o", str(out))
        assert code == 0
        assert json.loads(out.read_text())["points"]["A"] == [6, 1.8333333333333333]
        assert "class: generic" in stdout

    def test_stdout_and_json(self, capsys):
        code, stdout, _ = run(capsys, "generate", "--abscissas", "1,2,3,4,6")
        assert code == 0
        assert json.loads(stdout)["format"] == files.PATTERN_FORMAT

    def test_random_deterministic(self, tmp_path, capsys):
        for name in ("a.json", "b.json"):
            assert run(capsys, "generate", "--random", "--seed", "42", "-o", str(tmp_path / name))[0] == 0
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        run(capsys, "generate", "--random", "--seed", "43", "-o", str(tmp_path / "c.json"))
        assert (tmp_path / "a.json").read_bytes() != (tmp_path / "c.json").read_bytes()

    def test_duplicate(self, capsys):
        code, _, err = run(capsys, "generate", "--abscissas", "1,1,2,3,4")
        assert code == 2
        payload = json.loads(err)
        assert "duplicate abscissa" in payload["message"]
        assert payload["exit_code"] == 2

    def test_trapezoid_kinds(self, tmp_path, capsys):
        code, stdout, _ = run(capsys, "generate", "--trapezoid=-2.1,0.7,1.9,1.3,-0.6", "-o", str(tmp_path / "t.json"), "--json")
        assert code == 0
        assert json.loads(stdout)["class"] == "trapezoidal-horizontal"
        code, stdout, _ = run(capsys, "generate", "--random", "--kind", "trapezoidal", "--vertical", "-o", str(tmp_path / "v.json"), "--json")
        assert code == 0
        assert json.loads(stdout)["class"] == "trapezoidal-vertical"


class TestCommands:
    def test_missing_file(self, tmp_path, capsys):
        for cmd in ("quartic", "measure", "verify", "orbit", "mutate", "render"):
            argv = [cmd, "-i", str(tmp_path / "nope.json")]
            if cmd == "orbit":
                argv += ["--steps", "2"]
            assert run(capsys, *argv)[0] == 1

    def test_steps_zero(self, pattern_file, capsys):
        code, _, err = run(capsys, "orbit", "-i", str(pattern_file), "--steps", "0")
        assert code == 2
        assert json.loads(err)["message"] == "steps must be positive"

    def test_orbit(self, pattern_file, tmp_path, capsys):
        out = tmp_path / "o.json"
        code, _, _ = run(capsys, "orbit", "-i", str(pattern_file), "--steps", "10", "-o", str(out))
        assert code == 0
        rec = json.loads(out.read_text())
        S = files.read_pattern(pattern_file)
        summary = rec["summary"]
        assert rec["format"] == files.ORBIT_FORMAT
        assert len(rec["steps"]) == 11 and summary["steps_completed"] == 10
        assert rec["steps"][0]["points"] == files.pattern_to_dict(S)["points"]
        assert summary["max_conserved_drift"] <= 1e-8 * S.scale
        assert summary["max_prediction_error"] <= 1e-6 * S.scale
        assert rec["steps"][1]["residuals"]["prediction"] <= 1e-7 * S.scale
        E1 = Point2(*rec["steps"][1]["points"]["E"])
        assert distance(E1, miquel_step(S).E) <= 1e-12 * S.scale
        assert summary["unprojected_steps"] == 0
        assert summary["max_projection_shift"] <= 1e-11 * S.scale

    def test_mutate(self, pattern_file, tmp_path, capsys):
        out = tmp_path / "m.json"
        assert run(capsys, "mutate", "-i", str(pattern_file), "--color", "black", "-o", str(out))[0] == 0
        S, T = files.read_pattern(pattern_file), files.read_pattern(out)
        assert T.A == S.A

    def test_quartic_invariant(self, pattern_file, tmp_path, capsys):
        code, q0, _ = run(capsys, "quartic", "-i", str(pattern_file))
        assert code == 0
        files.write_pattern(tmp_path / "n.json", miquel_step(files.read_pattern(pattern_file)))
        _, q1, _ = run(capsys, "quartic", "-i", str(tmp_path / "n.json"))
        q0, q1 = json.loads(q0), json.loads(q1)
        r = max(abs(q0["a"]), abs(q0["b"]), math.sqrt(abs(q0["c"])))
        assert abs(q0["a"] - q1["a"]) <= 1e-7 * r
        assert abs(q0["b"] - q1["b"]) <= 1e-7 * r
        assert abs(q0["c"] - q1["c"]) <= 1e-7 * r * r

    def test_measure(self, pattern_file, capsys):
        code, out, _ = run(capsys, "measure", "-i", str(pattern_file), "--steps", "12")
        assert code == 0
        rep = json.loads(out)
        assert all(set(e) == {"from_step", "to_step", "branch", "measure"} for e in rep)
        vals = [e["measure"] for e in rep]
        assert max(vals) - min(vals) <= 1e-6 * max(vals)

    def test_tolerance_env(self, pattern_file, capsys, monkeypatch):
        monkeypatch.setenv("MIQUEL_TOL", "not-a-number")
        assert run(capsys, "quartic", "-i", str(pattern_file))[0] == 2
        monkeypatch.setenv("MIQUEL_TOL", "1e-8")
        assert run(capsys, "quartic", "-i", str(pattern_file))[0] == 0
        assert run(capsys, "quartic", "-i", str(pattern_file), "--tol", "-1")[0] == 2


class TestVerify:
    def test_generic(self, pattern_file, capsys):
        code, out, _ = run(capsys, "verify", "-i", str(pattern_file))
        assert code == 0
        rep = json.loads(out)
        for key in ("theorem3_residual_white", "theorem3_residual_black", "prop5_residual", "group_axiom_residuals", "skipped_trials"):
            assert key in rep
        assert max(rep["theorem3_residual_white"], rep["theorem3_residual_black"], rep["prop5_residual"]) <= 1e-7

    def test_trapezoidal(self, tmp_path, capsys):
        path = tmp_path / "t.json"
        files.write_pattern(path, from_trapezoid(-2.1, 0.7, 1.9, 1.3, -0.6))
        assert run(capsys, "verify", "-i", str(path))[0] == 0

    def test_degenerate(self, tmp_path, capsys):
        S = from_trapezoid(*DEGENERATE_TRAPEZOID)
        q = quartic_of_pattern(S)
        assert q.a == q.b
        path = tmp_path / "d.json"
        files.write_pattern(path, S)
        code, out, err = run(capsys, "verify", "-i", str(path), "--json")
        assert code == 3
        payload = json.loads(err)
        assert payload["error"] == "NotNondegenerate"
        assert payload["details"]["a==b"] is True
        assert json.loads(out) == payload


class TestRender:
    def test_deterministic_and_valid(self, pattern_file, tmp_path, capsys):
        for name in ("a.svg", "b.svg"):
            argv = ["render", "-i", str(pattern_file), "--steps", "4", "-o", str(tmp_path / name)]
            assert run(capsys, *argv)[0] == 0
        a = (tmp_path / "a.svg").read_bytes()
        assert a == (tmp_path / "b.svg").read_bytes()
        root = ET.fromstring(a)
        assert root.get("version") == "1.1"
        assert b"<!-- skipped" not in a

    def test_unknown_layer(self, pattern_file, capsys):
        assert run(capsys, "render", "-i", str(pattern_file), "--layers", "circles,bogus")[0] == 2

    def test_skip_is_noted(self):
        svg = render_svg(from_trapezoid(*DEGENERATE_TRAPEZOID))
        assert "<!-- skipped" in svg

    def test_polyline_membership_and_orbit_tube(self):
        (S,) = generic_patterns(72, 1, nondegenerate=True)
        q = quartic_of_pattern(S)
        orbit = [S]
        for _ in range(8):
            orbit.append(miquel_step(orbit[-1]))
        scene = _build(S, orbit, RenderOptions())
        curve = [line for line, stroke, _ in scene.polylines if stroke == "#c53030"]
        assert curve and all(len(line) >= 400 for line in curve)
        for line in curve:
            for p in line:
                assert is_on_curve(q, p, 1e-6)
        for T in orbit:
            assert _polyline_distance(curve, np.array([T.E.x, T.E.y])) <= 1e-3 * S.scale


def _polyline_distance(lines, p):
    best = math.inf
    for line in lines:
        a = np.array([(t.x, t.y) for t in line[:-1]])
        b = np.array([(t.x, t.y) for t in line[1:]])
        d = b - a
        t = np.clip(np.einsum("ij,ij->i", p - a, d) / np.maximum(np.einsum("ij,ij->i", d, d), 1e-300), 0.0, 1.0)
        best = min(best, float(np.min(np.linalg.norm(a + d * t[:, None] - p, axis=1))))
    return best


def test_console_script(tmp_path):
    out = tmp_path / "s.json"
    proc = subprocess.run(
        [sys.executable, "-m", "miquel.cli", "generate", "--abscissas", "1,2,3,4,6", "-o", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    bad = subprocess.run([sys.executable, "-m", "miquel.cli", "quartic", "-i", str(tmp_path / "x.json")], capture_output=True, text=True)
    assert bad.returncode == 1
