"""Shared fixtures and the closed-form rational oracle for hyperbola patterns."""

from fractions import Fraction

import numpy as np
import pytest

from miquel.geometry import Point2
from miquel.pattern import PatternClass, classify, random_generic, random_trapezoidal
from miquel.quartic import MiquelQuartic, is_nondegenerate, quartic_of_pattern


def oracle_points(b, d, e, f, h) -> dict[str, tuple[Fraction, Fraction]]:
    """Nine vertices for B, D, E, F, H on xy = 1, from closed forms in the abscissas.

    A = (b+d+e, 1/b+1/d+1/e) and its analogues for C, G, I; nothing here
    calls the library's reconstruction.
    """
    b, d, e, f, h = (Fraction(t) for t in (b, d, e, f, h))

    def on(t):
        return (t, 1 / t)

    def tri(x, y, z):
        return (x + y + z, 1 / x + 1 / y + 1 / z)

    return {
        "A": tri(b, d, e),
        "B": on(b),
        "C": tri(b, e, f),
        "D": on(d),
        "E": on(e),
        "F": on(f),
        "G": tri(d, e, h),
        "H": on(h),
        "I": tri(e, f, h),
    }


def oracle_omega_and_focus(b, d, e, f, h):
    b, d, e, f, h = (Fraction(t) for t in (b, d, e, f, h))
    prod = b * d * e * f * h
    omega = ((b + d + 2 * e + f + h) / 2, (1 / b + 1 / d + 2 / e + 1 / f + 1 / h) / 2)
    P = ((b + d + e + f + h - prod) / 2, (1 / b + 1 / d + 1 / e + 1 / f + 1 / h - 1 / prod) / 2)
    return omega, P


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def fixture_quartic():
    """(a, b, c) = (-5, 3, 4) in the identity frame."""
    return MiquelQuartic(-5.0, 3.0, 4.0, Point2(0.0, 0.0), Point2(1.0, 0.0))


def generic_patterns(seed: int, n: int, nondegenerate: bool = False):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        S = random_generic(rng)
        if nondegenerate and not is_nondegenerate(quartic_of_pattern(S)):
            continue
        out.append(S)
    return out


def trapezoidal_patterns(seed: int, n: int, nondegenerate: bool = False):
    rng = np.random.default_rng(seed)
    out = []
    k = 0
    while len(out) < n:
        S = random_trapezoidal(rng, vertical=bool(k % 2))
        k += 1
        if nondegenerate and not is_nondegenerate(quartic_of_pattern(S)):
            continue
        out.append(S)
    return out


def assert_class(S, cls: PatternClass):
    assert classify(S) is cls
