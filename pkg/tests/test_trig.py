"""Exact trig-polynomial arithmetic."""

import math
from fractions import Fraction

import numpy as np
import pytest

from beltrami.trig import COS, SIN, TrigPoly

from conftest import poly_eval, random_point, random_trigpoly

sinz = TrigPoly.sinwave((0, 0, 1))
cosz = TrigPoly.coswave((0, 0, 1))
cosy = TrigPoly.coswave((0, 1, 0))


def test_product_to_sum_sin_cos():
    # sin(z) cos(z) = (1/2) sin(2z)
    assert sinz * cosz == TrigPoly.sinwave((0, 0, 2), Fraction(1, 2))


def test_product_to_sum_sin_sin():
    # sin(z)^2 = 1/2 - (1/2) cos(2z)
    expected = TrigPoly.constant(Fraction(1, 2)) \
        + TrigPoly.coswave((0, 0, 2), Fraction(-1, 2))
    assert sinz * sinz == expected


def test_square_of_sum_matches_pointwise_sampling():
    p = sinz + cosy
    sq = p * p
    # oracle: brute-force pointwise sampling on a 5^3 grid
    axis = [2.0 * math.pi * i / 5 for i in range(5)]
    for x in axis:
        for y in axis:
            for z in axis:
                direct = (math.sin(z) + math.cos(y)) ** 2
                assert abs(poly_eval(sq, (x, y, z)) - direct) < 1e-12
    # and the canonical coefficients the expansion must produce
    assert sq.terms == {
        ((0, 0, 0), COS): Fraction(1),
        ((0, 0, 2), COS): Fraction(-1, 2),
        ((0, 2, 0), COS): Fraction(1, 2),
        ((0, 1, 1), SIN): Fraction(1),
        ((0, 1, -1), SIN): Fraction(-1),
    }


def test_canonical_form_rules():
    # sin with the zero mode dies, modes are sign-normalized
    assert TrigPoly.sinwave((0, 0, 0)).is_zero()
    assert TrigPoly.coswave((0, 0, 0)) == TrigPoly.one()
    assert TrigPoly.coswave((-1, 2, 0)) == TrigPoly.coswave((1, -2, 0))
    assert TrigPoly.sinwave((-1, 2, 0)) == TrigPoly.sinwave((1, -2, 0), -1)
    # no zero-coefficient terms survive
    assert (sinz - sinz).terms == {}


def test_mean_is_zero_mode_coefficient(rng):
    for _ in range(20):
        p = random_trigpoly(rng) * random_trigpoly(rng)
        assert p.mean() == p.coefficient((0, 0, 0), COS)
    p = TrigPoly.constant(Fraction(3, 7)) + sinz
    assert p.mean() == Fraction(3, 7)


def test_ring_axioms_random(rng):
    for _ in range(50):
        a = random_trigpoly(rng)
        b = random_trigpoly(rng)
        c = random_trigpoly(rng)
        assert a * b == b * a
        assert (a + b) * c == a * c + b * c
        assert (a * b) * c == a * (b * c)


def test_derivative_rules(rng):
    assert cosz.diff(2) == -sinz
    assert sinz.diff(2) == cosz
    assert sinz.diff(0).is_zero()
    for _ in range(30):
        a = random_trigpoly(rng)
        b = random_trigpoly(rng)
        for axis in range(3):
            # Leibniz rule holds exactly
            assert (a * b).diff(axis) == a.diff(axis) * b + a * b.diff(axis)


def test_eval_matches_per_term_oracle(rng):
    for _ in range(25):
        p = random_trigpoly(rng, n_terms=4)
        pt = random_point(rng)
        assert abs(p.eval(np.asarray(pt)) - poly_eval(p, pt)) < 1e-12
        f = p.compiled()
        assert abs(f(*pt) - poly_eval(p, pt)) < 1e-12


def test_division_by_constant_is_exact():
    p = sinz / 2
    assert p == TrigPoly.sinwave((0, 0, 1), Fraction(1, 2))
    with pytest.raises(ZeroDivisionError):
        sinz / 0


def test_bounds_are_certified(rng):
    for _ in range(20):
        p = random_trigpoly(rng)
        lo, hi = p.lower_bound(), p.upper_bound()
        vals = p.eval(np.random.default_rng(1).uniform(0, 2 * math.pi, (200, 3)))
        assert np.all(vals >= float(lo) - 1e-12)
        assert np.all(vals <= float(hi) + 1e-12)


def test_gradient_bound(rng):
    for _ in range(10):
        p = random_trigpoly(rng)
        gb = p.grad_bound()
        pts = np.random.default_rng(2).uniform(0, 2 * math.pi, (100, 3))
        for axis in range(3):
            dv = p.diff(axis).eval(pts)
            assert np.all(np.abs(dv) <= gb + 1e-12)


def test_shift_translates_floatwise(rng):
    p = random_trigpoly(rng)
    off = (0.3, 1.1, 2.7)
    q = p.shift(off)
    for _ in range(10):
        pt = random_point(rng)
        moved = tuple(a + b for a, b in zip(pt, off))
        assert abs(poly_eval(q, pt) - poly_eval(p, moved)) < 1e-12
    assert q.mean() == pytest.approx(float(p.mean()), abs=1e-12)


def test_float_coefficients_mix_with_rationals():
    p = TrigPoly.constant(math.sqrt(2.0)) + sinz
    assert p.has_float_coeffs()
    q = p * TrigPoly.constant(Fraction(1, 2))
    assert abs(q.mean() - math.sqrt(2.0) / 2) < 1e-15
