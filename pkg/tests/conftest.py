"""Shared generators and independent pointwise oracles.

The oracles evaluate the defining formulas of each operator directly in
floating point (hand-written 3D index algebra, per-term derivatives), so
they share no code path with the exact implementation they check.
"""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from beltrami.trig import COS, SIN, TrigPoly
from beltrami.forms import KForm, Metric, VectorField, VolumeForm


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_coeff(rng, denom=4):
    num = rng.randint(-6, 6)
    den = rng.randint(1, denom)
    return Fraction(num, den)


def random_trigpoly(rng, max_mode=3, n_terms=3, denom=4, nonzero=False):
    terms = []
    for _ in range(n_terms):
        k = tuple(rng.randint(-max_mode, max_mode) for _ in range(3))
        parity = rng.choice((COS, SIN))
        terms.append(((k, parity), random_coeff(rng, denom)))
    p = TrigPoly(terms)
    if nonzero and p.is_zero():
        return TrigPoly.constant(1) + p
    return p


def random_kform(rng, degree, **kw):
    ncomp = {0: 1, 1: 3, 2: 3, 3: 1}[degree]
    return KForm(degree, tuple(random_trigpoly(rng, **kw) for _ in range(ncomp)))


def random_vfield(rng, **kw):
    return VectorField(tuple(random_trigpoly(rng, **kw) for _ in range(3)))


def random_diag_metric(rng):
    def entry():
        return Fraction(rng.randint(1, 5), rng.randint(1, 3))
    return Metric.diagonal(entry(), entry(), entry())


def random_const_volume(rng):
    c = Fraction(rng.randint(1, 4), rng.randint(1, 3))
    if rng.random() < 0.3:
        c = -c
    return VolumeForm(TrigPoly.constant(c))


def random_point(rng):
    return tuple(rng.uniform(0.0, 2.0 * math.pi) for _ in range(3))


# -- independent float evaluation of the defining formulas ------------------------


def poly_eval(p: TrigPoly, pt) -> float:
    """Evaluate term by term with math.cos/math.sin, bypassing .eval()."""
    x, y, z = pt
    total = 0.0
    for (k, parity), c in p.terms.items():
        phase = k[0] * x + k[1] * y + k[2] * z
        total += float(c) * (math.cos(phase) if parity == COS else math.sin(phase))
    return total


def poly_diff_eval(p: TrigPoly, axis: int, pt) -> float:
    """Per-term derivative of the defining sum, evaluated in floats."""
    x, y, z = pt
    total = 0.0
    for (k, parity), c in p.terms.items():
        ki = k[axis]
        if ki == 0:
            continue
        phase = k[0] * x + k[1] * y + k[2] * z
        if parity == COS:
            total += -float(c) * ki * math.sin(phase)
        else:
            total += float(c) * ki * math.cos(phase)
    return total


def scalar_eval(s, pt) -> float:
    if isinstance(s, TrigPoly):
        return poly_eval(s, pt)
    return float(s.eval(np.asarray(pt)))


def form_values(a: KForm, pt):
    return [scalar_eval(c, pt) for c in a.components]


def vec_values(v: VectorField, pt):
    return [scalar_eval(c, pt) for c in v.components]


def wedge11_oracle(a, b):
    return [a[0] * b[1] - a[1] * b[0],
            a[0] * b[2] - a[2] * b[0],
            a[1] * b[2] - a[2] * b[1]]


def wedge12_oracle(a, b):
    # 1-form against (b01, b02, b12)
    return [a[0] * b[2] - a[1] * b[1] + a[2] * b[0]]


def interior1_oracle(xv, a):
    return [xv[0] * a[0] + xv[1] * a[1] + xv[2] * a[2]]


def interior2_oracle(xv, b):
    return [-xv[1] * b[0] - xv[2] * b[1],
            xv[0] * b[0] - xv[2] * b[2],
            xv[0] * b[1] + xv[1] * b[2]]


def interior3_oracle(xv, c):
    return [c[0] * xv[2], -c[0] * xv[1], c[0] * xv[0]]


def curl_classical_oracle(x: VectorField, pt):
    """Classical curl from per-term derivatives (Euclidean, unit volume)."""
    d = lambda comp, axis: poly_diff_eval(comp, axis, pt)
    fx, fy, fz = x.components
    return [d(fz, 1) - d(fy, 2), d(fx, 2) - d(fz, 0), d(fy, 0) - d(fx, 1)]
