"""Expression fields: folding, witnesses, symbolic differentiation."""

import math
from fractions import Fraction

import numpy as np
import pytest

from beltrami.exprfield import (ExprField, WitnessError, sadd, sdiv, smul,
                                sneg, spow, ssqrt, ssub)
from beltrami.trig import TrigPoly

from conftest import random_point, random_trigpoly

two_plus_cosz = TrigPoly.constant(2) + TrigPoly.coswave((0, 0, 1))
sinz = TrigPoly.sinwave((0, 0, 1))


def test_pure_trig_trees_fold_back():
    p = sadd(sinz, smul(two_plus_cosz, sinz))
    assert isinstance(p, TrigPoly)
    # division by a constant folds, sqrt of a perfect square folds
    assert isinstance(sdiv(sinz, TrigPoly.constant(Fraction(3, 2))), TrigPoly)
    assert ssqrt(TrigPoly.constant(Fraction(9, 4))) == TrigPoly.constant(Fraction(3, 2))
    assert spow(sinz, 2) == sinz * sinz


def test_division_produces_witnessed_node():
    q = sdiv(1, two_plus_cosz)
    assert isinstance(q, ExprField)
    w = q.witness
    assert w.kind == "nonvanishing"
    assert w.ok and w.certified
    assert w.min_value == pytest.approx(1.0, abs=1e-2)


def test_division_by_vanishing_denominator_lacks_witness():
    q = sdiv(1, sinz)  # vanishes on z = 0 and z = pi
    w = q.witness
    assert not w.certified
    # the cell-centered grid still sees only small values near the zeros
    assert w.min_value < 0.1


def test_maybe_trigpoly_roundtrip():
    e = ExprField("mul", (ExprField("poly", poly=sinz),
                          ExprField("poly", poly=two_plus_cosz)))
    assert e.maybe_trigpoly() == sinz * two_plus_cosz
    q = sdiv(1, two_plus_cosz)
    assert q.maybe_trigpoly() is None


def test_eval_matches_closed_form(rng):
    f = sdiv(sinz, two_plus_cosz)
    g = ssqrt(two_plus_cosz)
    for _ in range(25):
        pt = random_point(rng)
        z = pt[2]
        assert f.eval(np.asarray(pt)) == pytest.approx(
            math.sin(z) / (2 + math.cos(z)), abs=1e-14)
        assert g.eval(np.asarray(pt)) == pytest.approx(
            math.sqrt(2 + math.cos(z)), abs=1e-14)
        assert f.compiled()(*pt) == pytest.approx(
            math.sin(z) / (2 + math.cos(z)), abs=1e-14)


def test_symbolic_derivatives_against_finite_differences(rng):
    fields = [
        sdiv(sinz, two_plus_cosz),
        ssqrt(two_plus_cosz),
        spow(sdiv(1, two_plus_cosz), 3),
        ssub(smul(sinz, sdiv(1, two_plus_cosz)), ssqrt(two_plus_cosz)),
    ]
    h = 1e-6
    for f in fields:
        for axis in range(3):
            df = f.diff(axis)
            for _ in range(8):
                pt = np.asarray(random_point(rng))
                plus, minus = pt.copy(), pt.copy()
                plus[axis] += h
                minus[axis] -= h
                fd = (f.eval(plus) - f.eval(minus)) / (2 * h)
                assert df.eval(pt) == pytest.approx(fd, abs=5e-9)


def test_derivative_of_quotient_is_witnessed():
    f = sdiv(sinz, two_plus_cosz)
    df = f.diff(2)
    # the derivative introduces a v^2 denominator with its own witness
    nodes = [df]
    seen_div = False
    while nodes:
        n = nodes.pop()
        if isinstance(n, ExprField):
            if n.op == "div":
                seen_div = True
                assert n.witness.ok
            nodes.extend(n.args)
    assert seen_div


def test_bounds_are_conservative(rng):
    f = sdiv(sinz, two_plus_cosz)
    sup = f.sup_bound()
    gb = f.grad_bound()
    pts = np.random.default_rng(3).uniform(0, 2 * math.pi, (500, 3))
    vals = f.eval(pts)
    assert np.all(np.abs(vals) <= sup + 1e-12)
    dz = f.diff(2).eval(pts)
    assert np.all(np.abs(dz) <= gb + 1e-9)


def test_structural_equality_ignores_caches():
    a = sdiv(sinz, two_plus_cosz)
    b = sdiv(sinz, two_plus_cosz)
    _ = a.witness  # warm one cache only
    assert a == b


def test_mixed_operator_dispatch():
    e = sdiv(1, two_plus_cosz)
    assert isinstance(sinz + e, ExprField)
    assert isinstance(e * sinz, ExprField)
    assert isinstance(2 * e, ExprField)
    assert isinstance(sinz / two_plus_cosz, ExprField)
    assert isinstance(-e, ExprField)
