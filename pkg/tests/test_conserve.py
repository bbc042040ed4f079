import math

import pytest
from conftest import generic_patterns, trapezoidal_patterns

from miquel import conserve
from miquel.conserve import conserving_step, invariant_level, project_to_level
from miquel.errors import SolverFailure
from miquel.geometry import distance
from miquel.group_law import add, lift, translation_step
from miquel.measure import _arcs, oval_position, step_measure
from miquel.pattern import conserved_quantities, miquel_step
from miquel.quartic import quartic_of_pattern


def test_projection_fixes_the_corners():
    for S in generic_patterns(100, 10) + trapezoidal_patterns(101, 6):
        level = invariant_level(S)
        raw = miquel_step(S)
        T = project_to_level(raw, level)
        assert (T.A, T.C, T.G) == (S.A, S.C, S.G)
        assert distance(T.I, S.I) <= 1e-12 * S.scale
        c0, c1 = conserved_quantities(S), conserved_quantities(T)
        assert abs(math.remainder(c1.angle_CBA - c0.angle_CBA, math.pi)) <= 1e-12
        assert abs(math.remainder(c1.angle_ADG - c0.angle_ADG, math.pi)) <= 1e-12
        shift = max(distance(p, r) for p, r in zip(T.points().values(), raw.points().values()))
        assert shift <= 1e-9 * S.scale  # within the accuracy of a raw step


def test_trapezoidal_loci_are_lines():
    for S in trapezoidal_patterns(102, 4):
        level = invariant_level(S)
        assert level.b_locus.line is not None or level.d_locus.line is not None


def test_fallback_keeps_raw_step(monkeypatch):
    (S,) = generic_patterns(103, 1)
    level = invariant_level(S)

    def refuse(*_args, **_kw):
        raise SolverFailure("forced")

    monkeypatch.setattr(conserve, "project_to_level", refuse)
    step = conserving_step(S, level)
    assert not step.projected
    assert step.pattern == step.raw == miquel_step(S)


@pytest.mark.parametrize("seed", [80, 104])
def test_phase_error_stays_at_roundoff(seed):
    """Over 200 projected steps the oval phase error against iterated addition stays near 1e-11.

    The error moves in isolated jumps rather than a smooth power law, so only the level is checked.
    """
    K = 200
    worst = 0.0
    for S in generic_patterns(seed, 3, nondegenerate=True):
        q = quartic_of_pattern(S)
        arcs = _arcs(q)
        tau = translation_step(q, S)
        level = invariant_level(S)
        T, P = S, lift(q, S.E)
        for _ in range(K):
            T = conserving_step(T, level).pattern
            P = add(q, P, tau)
            a = oval_position(q, q.to_frame(T.E), arcs)
            b = oval_position(q, P.point, arcs)
            worst = max(worst, step_measure(a, b) / a.length)
    assert worst <= 1e-10
