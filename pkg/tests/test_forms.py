"""Exterior-calculus operators: spec examples, identities, pointwise oracles."""

import math
from fractions import Fraction

import numpy as np
import pytest

from beltrami.forms import (DegreeError, KForm, Metric, VectorField,
                            VolumeForm, cross, curl, euclidean_metric, ext_d,
                            flat, hodge, interior, is_volume_preserving,
                            lie_derivative, sharp, standard_volume, wedge)
from beltrami.trig import TrigPoly

from conftest import (curl_classical_oracle, form_values, interior1_oracle,
                      interior2_oracle, interior3_oracle, poly_diff_eval,
                      random_diag_metric, random_kform, random_point,
                      random_trigpoly, random_vfield, random_const_volume,
                      vec_values, wedge11_oracle, wedge12_oracle)

sinz = TrigPoly.sinwave((0, 0, 1))
cosz = TrigPoly.coswave((0, 0, 1))
zero = TrigPoly.zero()
one = TrigPoly.one()

EUCLID = euclidean_metric()
STD_VOL = standard_volume()


def dx(c=one):
    return KForm(1, (c, zero, zero))


def dy(c=one):
    return KForm(1, (zero, c, zero))


def dz(c=one):
    return KForm(1, (zero, zero, c))


def giroux1():
    return KForm(1, (sinz, cosz, zero))


# -- wedge ------------------------------------------------------------------


def test_wedge_basis_example():
    # sin(z)dx ^ cos(z)dy = (1/2) sin(2z) dx^dy
    w = wedge(dx(sinz), dy(cosz))
    assert w.component((0, 1)) == TrigPoly.sinwave((0, 0, 2), Fraction(1, 2))
    assert w.component((0, 2)).is_zero() and w.component((1, 2)).is_zero()


def test_wedge_normal_form_density():
    # hand expansion: sin^2 + cos^2 collapses the density to the twist rate
    for n in (1, 2, 3):
        a = KForm(1, (TrigPoly.sinwave((0, 0, n)),
                      TrigPoly.coswave((0, 0, n)), zero))
        top = wedge(a, ext_d(a))
        assert top.component((0, 1, 2)) == TrigPoly.constant(n)
        # cross-check by pointwise evaluation of the defining product
        for pt in [(0.3, 1.2, 2.1), (5.0, 0.1, 4.4)]:
            av = form_values(a, pt)
            dv = form_values(ext_d(a), pt)
            assert wedge12_oracle(av, dv)[0] == pytest.approx(n, abs=1e-12)


def test_wedge_self_annihilates(rng):
    for _ in range(30):
        a = random_kform(rng, 1)
        assert wedge(a, a).is_zero()


def test_wedge_degree_overflow():
    with pytest.raises(DegreeError):
        wedge(random_kform_static(), KForm(3, (one,)))


def random_kform_static():
    return KForm(1, (sinz, cosz, one))


def test_wedge_graded_commutativity_and_associativity(rng):
    for _ in range(70):
        da, db = rng.choice(((0, 1), (1, 1), (1, 2), (0, 2), (2, 1)))
        a = random_kform(rng, da, n_terms=2)
        b = random_kform(rng, db, n_terms=2)
        ab = wedge(a, b)
        ba = wedge(b, a)
        sign = (-1) ** (da * db)
        flipped = ba.scale(sign)
        assert all((x - y).is_zero() if isinstance(x, TrigPoly) else False
                   for x, y in zip(ab.components, flipped.components))
    for _ in range(70):
        a = random_kform(rng, 1, n_terms=2)
        b = random_kform(rng, 1, n_terms=2)
        c = random_kform(rng, 1, n_terms=2)
        left = wedge(wedge(a, b), c)
        right = wedge(a, wedge(b, c))
        assert all((x - y).is_zero() for x, y in
                   zip(left.components, right.components))


# -- exterior derivative ------------------------------------------------------


def test_d_of_twisting_form():
    for n in (1, 2):
        a = KForm(1, (TrigPoly.sinwave((0, 0, n)), zero, zero))
        da = ext_d(a)
        # d(sin(nz) dx) = n cos(nz) dz^dx = -n cos(nz) dx^dz
        assert da.component((0, 2)) == TrigPoly.coswave((0, 0, n), -n)
        assert da.component((0, 1)).is_zero()
        assert da.component((1, 2)).is_zero()


def test_d_of_normal_form():
    a = giroux1()
    da = ext_d(a)
    assert da.component((0, 2)) == TrigPoly.coswave((0, 0, 1), -1)
    assert da.component((1, 2)) == TrigPoly.sinwave((0, 0, 1))
    # pointwise: each component of d matches the per-term derivative oracle
    for pt in [(0.7, 2.9, 1.3)]:
        assert form_values(da, pt)[0] == pytest.approx(
            poly_diff_eval(a.components[1], 0, pt)
            - poly_diff_eval(a.components[0], 1, pt), abs=1e-12)


def test_d_squared_vanishes_on_200_random_forms(rng):
    count = 0
    for _ in range(200):
        degree = rng.choice((0, 1, 2))
        a = random_kform(rng, degree, max_mode=3)
        assert ext_d(ext_d(a)).is_zero()
        count += 1
    assert count == 200


def test_d_on_top_degree_returns_zero():
    a = KForm(3, (sinz,))
    assert ext_d(a).degree == 3
    assert ext_d(a).is_zero()


# -- interior product ----------------------------------------------------------


def test_interior_basis_contraction():
    w = KForm(2, (one, zero, zero))  # dx^dy
    got = interior(VectorField.constant((1, 0, 0)), w)
    assert got.component((1,)) == one
    assert got.component((0,)).is_zero() and got.component((2,)).is_zero()


def test_interior_normalization_of_reeb_pair():
    a = giroux1()
    x = VectorField((sinz, cosz, zero))
    assert interior(x, a).components[0] == one


def test_interior_squared_vanishes(rng):
    mu = STD_VOL.as_kform()
    for _ in range(30):
        x = random_vfield(rng, n_terms=2)
        assert interior(x, interior(x, mu)).is_zero()


def test_interior_on_functions_errors():
    with pytest.raises(DegreeError):
        interior(VectorField.constant((1, 0, 0)), KForm(0, (sinz,)))


# -- Lie derivative --------------------------------------------------------------


def test_lie_translation_derivative():
    a = KForm(1, (zero, TrigPoly.sinwave((1, 0, 0)), zero))
    got = lie_derivative(VectorField.constant((1, 0, 0)), a)
    assert got.component((1,)) == TrigPoly.coswave((1, 0, 0))


def test_lie_of_volume_detects_divergence():
    from beltrami.models import abc_field
    mu = STD_VOL.as_kform()
    got = lie_derivative(abc_field((1, 1, 1)), mu)
    assert got.is_zero()


def test_lie_collapses_on_reeb_pair():
    a = giroux1()
    x = VectorField((sinz, cosz, zero))
    assert lie_derivative(x, a).is_zero()


def test_cartan_formula_exact(rng):
    for _ in range(200):
        degree = rng.choice((1, 2))
        a = random_kform(rng, degree, n_terms=2)
        x = random_vfield(rng, n_terms=2)
        lhs = lie_derivative(x, a)
        rhs = interior(x, ext_d(a)) + ext_d(interior(x, a))
        assert all((u - v).is_zero() for u, v in
                   zip(lhs.components, rhs.components))


# -- musical isomorphisms ---------------------------------------------------------


def test_flat_examples():
    assert flat(VectorField.constant((1, 0, 0)), EUCLID).component((0,)) == one
    x = VectorField((sinz, cosz, zero))
    a = flat(x, EUCLID)
    assert a.components == giroux1().components
    from beltrami.models import abc_field
    abc = abc_field((1, 1, 1))
    fa = flat(abc, EUCLID)
    assert all((u - v).is_zero() for u, v in zip(fa.components, abc.components))


def test_sharp_examples():
    assert sharp(dx(), EUCLID).components[0] == one
    got = sharp(giroux1(), EUCLID)
    assert got.components == (sinz, cosz, zero)
    g = Metric.diagonal(Fraction(1, 2), 1, 1)
    assert sharp(dx(), g).components[0] == TrigPoly.constant(2)


def test_sharp_flat_identity_random(rng):
    for _ in range(200):
        x = random_vfield(rng, n_terms=2)
        g = random_diag_metric(rng)
        back = sharp(flat(x, g), g)
        assert all((u - v).is_zero() for u, v in
                   zip(back.components, x.components))


# -- Hodge star --------------------------------------------------------------------


def test_hodge_euclidean_basis():
    assert hodge(dx(), EUCLID).component((1, 2)) == one
    assert hodge(KForm(0, (one,)), EUCLID).component((0, 1, 2)) == one
    got = hodge(dx(sinz), EUCLID)
    assert got.component((1, 2)) == sinz


def test_hodge_involution(rng):
    for degree in (0, 1, 2, 3):
        for _ in range(10):
            a = random_kform(rng, degree, n_terms=2)
            back = hodge(hodge(a, EUCLID), EUCLID)
            assert all((u - v).is_zero() for u, v in
                       zip(back.components, a.components))
    # exact on a non-Euclidean metric whose determinant is a perfect square
    g = Metric.diagonal(1, 4, 9)
    a = dx(sinz)
    back = hodge(hodge(a, g), g)
    assert all((u - v).is_zero() for u, v in zip(back.components, a.components))


# -- curl and volume preservation ---------------------------------------------------


def test_curl_eigenfields():
    from beltrami.models import abc_field, giroux_reeb
    abc = abc_field((1, 1, 1))
    w = curl(abc, EUCLID, STD_VOL)
    assert all((u - v).is_zero() for u, v in zip(w.components, abc.components))
    for n in (1, 2, 3):
        xn = giroux_reeb(n)
        wn = curl(xn, EUCLID, STD_VOL)
        scaled = xn.scale(n)
        assert all((u - v).is_zero() for u, v in
                   zip(wn.components, scaled.components))
    const = VectorField.constant((1, 0, 0))
    assert curl(const, EUCLID, STD_VOL).is_zero()


def test_curl_matches_classical_formula_random(rng):
    for _ in range(40):
        x = random_vfield(rng, n_terms=2)
        w = curl(x, EUCLID, STD_VOL)
        pt = random_point(rng)
        assert vec_values(w, pt) == pytest.approx(
            curl_classical_oracle(x, pt), abs=1e-10)


def test_curl_defining_equation_general_volume(rng):
    # i_W mu = d(i_X g) for a non-metric constant volume density
    for _ in range(20):
        x = random_vfield(rng, n_terms=2)
        g = random_diag_metric(rng)
        mu = random_const_volume(rng)
        w = curl(x, g, mu)
        lhs = interior(w, mu.as_kform())
        rhs = ext_d(flat(x, g))
        assert all((u - v).is_zero() for u, v in
                   zip(lhs.components, rhs.components))


def test_curl_via_hodge_agrees_when_volume_is_metric(rng):
    # the star formulation agrees with the volume-form definition
    for _ in range(15):
        x = random_vfield(rng, n_terms=2)
        w1 = curl(x, EUCLID, STD_VOL)
        w2 = sharp(hodge(ext_d(flat(x, EUCLID)), EUCLID), EUCLID)
        assert all((u - v).is_zero() for u, v in
                   zip(w1.components, w2.components))


def test_divergence_of_curl_vanishes_exactly(rng):
    for _ in range(200):
        x = random_vfield(rng, n_terms=2)
        g = random_diag_metric(rng)
        mu = random_const_volume(rng)
        rep = is_volume_preserving(curl(x, g, mu), mu)
        assert rep.preserving and rep.residual == 0.0


def test_volume_preservation_examples():
    from beltrami.models import abc_field
    assert is_volume_preserving(abc_field((1, 1, 1)), STD_VOL).preserving
    bad = VectorField((TrigPoly.sinwave((1, 0, 0)), zero, zero))
    rep = is_volume_preserving(bad, STD_VOL)
    assert not rep.preserving
    assert rep.residual_field == TrigPoly.coswave((1, 0, 0))
    assert is_volume_preserving(VectorField.constant((2, 3, 5)), STD_VOL).preserving


# -- cross product convention -------------------------------------------------------


def test_cross_matches_euclidean_formula(rng):
    for _ in range(20):
        v = random_vfield(rng, n_terms=2)
        w = random_vfield(rng, n_terms=2)
        got = cross(v, w, EUCLID)
        pt = random_point(rng)
        a, b = np.asarray(vec_values(v, pt)), np.asarray(vec_values(w, pt))
        assert vec_values(got, pt) == pytest.approx(list(np.cross(a, b)),
                                                    abs=1e-10)


# -- pointwise oracle across every exact operation ----------------------------------


def test_pointwise_oracle_125_points(rng):
    pts = [random_point(rng) for _ in range(125)]
    for _ in range(6):
        a1 = random_kform(rng, 1, n_terms=2)
        b1 = random_kform(rng, 1, n_terms=2)
        b2 = random_kform(rng, 2, n_terms=2)
        x = random_vfield(rng, n_terms=2)
        g = random_diag_metric(rng)
        mu3 = STD_VOL.as_kform()
        w11 = wedge(a1, b1)
        w12 = wedge(a1, b2)
        i1 = interior(x, a1)
        i2 = interior(x, b2)
        i3 = interior(x, mu3)
        fl = flat(x, g)
        sh = sharp(a1, g)
        gm = np.array([[float(g.entry(i, j).mean()) for j in range(3)]
                       for i in range(3)])
        for pt in pts:
            av, bv = form_values(a1, pt), form_values(b1, pt)
            b2v = form_values(b2, pt)
            xv = vec_values(x, pt)
            assert form_values(w11, pt) == pytest.approx(
                wedge11_oracle(av, bv), abs=1e-10)
            assert form_values(w12, pt) == pytest.approx(
                wedge12_oracle(av, b2v), abs=1e-10)
            assert form_values(i1, pt) == pytest.approx(
                interior1_oracle(xv, av), abs=1e-10)
            assert form_values(i2, pt) == pytest.approx(
                interior2_oracle(xv, b2v), abs=1e-10)
            assert form_values(i3, pt) == pytest.approx(
                interior3_oracle(xv, [1.0]), abs=1e-10)
            assert form_values(fl, pt) == pytest.approx(
                list(gm @ np.asarray(xv)), abs=1e-10)
            assert vec_values(sh, pt) == pytest.approx(
                list(np.linalg.solve(gm, np.asarray(av))), abs=1e-10)
