"""Exterior calculus on the flat 3-torus.

Differential forms, vector fields, metrics and volume forms whose
coefficients are :class:`~beltrami.trig.TrigPoly` or
:class:`~beltrami.exprfield.ExprField` scalars, together with the operators
everything else in the toolkit is built from: wedge product, exterior
derivative, interior product, Lie derivative, the musical isomorphisms,
Hodge star, curl and the volume-preservation check.

Storage conventions
-------------------
Degree-k forms store one coefficient per sorted multi-index:

* degree 0: ``()``
* degree 1: ``(0,) (1,) (2,)``            (dx, dy, dz)
* degree 2: ``(0,1) (0,2) (1,2)``          (dx^dy, dx^dz, dy^dz)
* degree 3: ``(0,1,2)``                    (dx^dy^dz)

Curl follows the volume-form definition: ``curl(X, g, mu)`` is the unique
field W with  i_W mu = d(i_X g).  The metric and the volume form are
independent inputs throughout; no normalization ties them together.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import grid
from .exprfield import (ExprField, as_scalar, lift, sadd, sdiv, smul, sneg,
                        ssqrt, ssub, s_eval, s_is_exact_zero, s_residual_max)
from .trig import TrigPoly

INDEX_SETS = {
    0: ((),),
    1: ((0,), (1,), (2,)),
    2: ((0, 1), (0, 2), (1, 2)),
    3: ((0, 1, 2),),
}
INDEX_POS = {deg: {idx: i for i, idx in enumerate(idxs)}
             for deg, idxs in INDEX_SETS.items()}


class DegreeError(ValueError):
    """Operation applied at an impossible form degree."""


class MetricError(ValueError):
    """Metric not symmetric or not invertible on the verification grid."""


class SingularFieldError(ValueError):
    """A vector field required to be nonsingular vanishes on the grid."""


def _merge_sign(left: tuple, right: tuple):
    """Sign of sorting left+right, or None if an index repeats."""
    if set(left) & set(right):
        return None
    combined = left + right
    sign = 1
    for i, j in itertools.combinations(range(len(combined)), 2):
        if combined[i] > combined[j]:
            sign = -sign
    return sign, tuple(sorted(combined))


@dataclass(frozen=True)
class KForm:
    degree: int
    components: tuple

    def __post_init__(self):
        if self.degree not in INDEX_SETS:
            raise DegreeError(f"degree {self.degree} out of range on a 3-manifold")
        want = len(INDEX_SETS[self.degree])
        if len(self.components) != want:
            raise ValueError(f"degree {self.degree} needs {want} components")
        object.__setattr__(self, "components",
                           tuple(as_scalar(c) for c in self.components))

    @classmethod
    def zero(cls, degree: int) -> "KForm":
        return cls(degree, tuple(TrigPoly.zero() for _ in INDEX_SETS[degree]))

    @classmethod
    def scalar(cls, f) -> "KForm":
        return cls(0, (as_scalar(f),))

    def component(self, idx: tuple):
        return self.components[INDEX_POS[self.degree][tuple(idx)]]

    def is_zero(self) -> bool:
        return all(s_is_exact_zero(c) for c in self.components)

    def map(self, fn) -> "KForm":
        return KForm(self.degree, tuple(fn(c) for c in self.components))

    def __add__(self, other):
        if not isinstance(other, KForm) or other.degree != self.degree:
            return NotImplemented
        return KForm(self.degree, tuple(sadd(a, b) for a, b in
                                        zip(self.components, other.components)))

    def __sub__(self, other):
        if not isinstance(other, KForm) or other.degree != self.degree:
            return NotImplemented
        return KForm(self.degree, tuple(ssub(a, b) for a, b in
                                        zip(self.components, other.components)))

    def __neg__(self):
        return self.map(sneg)

    def scale(self, c) -> "KForm":
        return self.map(lambda comp: smul(c, comp))

    def residual_max(self, grid_n: int = grid.DEFAULT_N) -> float:
        return max(s_residual_max(c, grid_n) for c in self.components)

    def eval(self, points) -> np.ndarray:
        """Component values at points, shape (..., ncomps)."""
        vals = [np.asarray(s_eval(c, points), dtype=float) for c in self.components]
        return np.stack(vals, axis=-1)


@dataclass(frozen=True)
class VectorField:
    components: tuple

    def __post_init__(self):
        if len(self.components) != 3:
            raise ValueError("vector fields on the 3-torus have 3 components")
        object.__setattr__(self, "components",
                           tuple(as_scalar(c) for c in self.components))

    @classmethod
    def zero(cls) -> "VectorField":
        return cls((TrigPoly.zero(),) * 3)

    @classmethod
    def constant(cls, v) -> "VectorField":
        return cls(tuple(TrigPoly.constant(c) for c in v))

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return VectorField(tuple(sadd(a, b) for a, b in
                                 zip(self.components, other.components)))

    def __sub__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return VectorField(tuple(ssub(a, b) for a, b in
                                 zip(self.components, other.components)))

    def __neg__(self):
        return VectorField(tuple(sneg(c) for c in self.components))

    def scale(self, c) -> "VectorField":
        return VectorField(tuple(smul(c, comp) for comp in self.components))

    def is_zero(self) -> bool:
        return all(s_is_exact_zero(c) for c in self.components)

    def norm_sq(self, g: "Metric"):
        """g(X, X) as a scalar field."""
        out = TrigPoly.zero()
        for i in range(3):
            for j in range(3):
                out = sadd(out, smul(g.entry(i, j),
                                     smul(self.components[i], self.components[j])))
        return out

    def eval(self, points) -> np.ndarray:
        vals = [np.asarray(s_eval(c, points), dtype=float) for c in self.components]
        return np.stack(vals, axis=-1)

    def compiled(self):
        """f(x, y, z) -> (u, v, w) float evaluator for the integrator."""
        fx, fy, fz = (c.compiled() for c in self.components)

        def f(x: float, y: float, z: float):
            return fx(x, y, z), fy(x, y, z), fz(x, y, z)

        return f

    def nonsingularity_min(self, g: "Metric | None" = None,
                           grid_n: int = grid.DEFAULT_N) -> float:
        """Grid minimum of g(X, X); exact lower bound used when positive."""
        nsq = self.norm_sq(g if g is not None else euclidean_metric())
        if isinstance(nsq, TrigPoly):
            lo = nsq.lower_bound()
            if lo > 0:
                return float(lo)
        return float(np.min(s_eval(nsq, grid.points(grid_n))))


def coordinate_field(axis: int) -> VectorField:
    comps = [TrigPoly.zero()] * 3
    comps[axis] = TrigPoly.one()
    return VectorField(tuple(comps))


def cross_euclidean(v: VectorField, w: VectorField) -> VectorField:
    a, b, c = v.components
    d, e, f = w.components
    return VectorField((ssub(smul(b, f), smul(c, e)),
                        ssub(smul(c, d), smul(a, f)),
                        ssub(smul(a, e), smul(b, d))))


@dataclass(frozen=True)
class Metric:
    rows: tuple

    def __post_init__(self):
        if len(self.rows) != 3 or any(len(r) != 3 for r in self.rows):
            raise MetricError("metric needs a 3x3 entry array")
        rows = tuple(tuple(as_scalar(e) for e in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        for i in range(3):
            for j in range(i + 1, 3):
                if not (rows[i][j] == rows[j][i]):
                    raise MetricError(f"metric entries ({i},{j}) and ({j},{i}) differ")

    @classmethod
    def diagonal(cls, d0, d1, d2) -> "Metric":
        z = TrigPoly.zero()
        return cls(((as_scalar(d0), z, z), (z, as_scalar(d1), z),
                    (z, z, as_scalar(d2))))

    @classmethod
    def from_upper(cls, g11, g12, g13, g22, g23, g33) -> "Metric":
        return cls(((g11, g12, g13), (g12, g22, g23), (g13, g23, g33)))

    def entry(self, i: int, j: int):
        return self.rows[i][j]

    def det(self):
        r = self.rows
        t1 = smul(r[0][0], ssub(smul(r[1][1], r[2][2]), smul(r[1][2], r[2][1])))
        t2 = smul(r[0][1], ssub(smul(r[1][0], r[2][2]), smul(r[1][2], r[2][0])))
        t3 = smul(r[0][2], ssub(smul(r[1][0], r[2][1]), smul(r[1][1], r[2][0])))
        return sadd(ssub(t1, t2), t3)

    def adjugate(self):
        """Transposed cofactor matrix: adj(g) @ g = det(g) * I."""
        r = self.rows

        def cof(i, j):
            rows = [k for k in range(3) if k != i]
            cols = [k for k in range(3) if k != j]
            m = ssub(smul(r[rows[0]][cols[0]], r[rows[1]][cols[1]]),
                     smul(r[rows[0]][cols[1]], r[rows[1]][cols[0]]))
            return m if (i + j) % 2 == 0 else sneg(m)

        # adj = cofactor^T; symmetric input gives a symmetric adjugate
        return tuple(tuple(cof(j, i) for j in range(3)) for i in range(3))

    def volume_form(self) -> "VolumeForm":
        """The metric volume sqrt(det g) dx^dy^dz."""
        return VolumeForm(ssqrt(self.det()))

    def positivity_min(self, grid_n: int = grid.DEFAULT_N) -> float:
        """Grid minimum over the three leading principal minors."""
        r = self.rows
        m1 = r[0][0]
        m2 = ssub(smul(r[0][0], r[1][1]), smul(r[0][1], r[1][0]))
        m3 = self.det()
        pts = grid.points(grid_n)
        return min(float(np.min(s_eval(m, pts))) for m in (m1, m2, m3))


def euclidean_metric() -> Metric:
    return Metric.diagonal(1, 1, 1)


@dataclass(frozen=True)
class VolumeForm:
    density: object

    def __post_init__(self):
        object.__setattr__(self, "density", as_scalar(self.density))

    @classmethod
    def standard(cls) -> "VolumeForm":
        return cls(TrigPoly.one())

    def as_kform(self) -> KForm:
        return KForm(3, (self.density,))

    def sign_certificate(self, grid_n: int = grid.DEFAULT_N):
        """(constant_sign, min_abs, exact) over the verification grid."""
        d = self.density
        if isinstance(d, TrigPoly):
            lo, hi = d.lower_bound(), d.upper_bound()
            if lo > 0 or hi < 0:
                return True, float(min(abs(lo), abs(hi))), True
        vals = s_eval(d, grid.points(grid_n))
        const_sign = bool(np.all(vals > 0) or np.all(vals < 0))
        return const_sign, grid.min_abs(vals), False


def standard_volume() -> VolumeForm:
    return VolumeForm.standard()


# -- core operators -------------------------------------------------------------


def wedge(a: KForm, b: KForm) -> KForm:
    """Graded-antisymmetric product; raises DegreeError above degree 3."""
    deg = a.degree + b.degree
    if deg > 3:
        raise DegreeError(f"wedge degree overflow: {a.degree} + {b.degree}")
    out = [TrigPoly.zero() for _ in INDEX_SETS[deg]]
    for ia, ca in zip(INDEX_SETS[a.degree], a.components):
        for ib, cb in zip(INDEX_SETS[b.degree], b.components):
            merged = _merge_sign(ia, ib)
            if merged is None:
                continue
            sign, idx = merged
            term = smul(ca, cb)
            if sign < 0:
                term = sneg(term)
            pos = INDEX_POS[deg][idx]
            out[pos] = sadd(out[pos], term)
    return KForm(deg, tuple(out))


def ext_d(a: KForm) -> KForm:
    """Exterior derivative. d of a 3-form is returned as the zero 3-form so
    generic identities like d(d(.)) = 0 can be stated uniformly."""
    if a.degree == 3:
        return KForm.zero(3)
    deg = a.degree + 1
    out = [TrigPoly.zero() for _ in INDEX_SETS[deg]]
    for idx, c in zip(INDEX_SETS[a.degree], a.components):
        for axis in range(3):
            if axis in idx:
                continue
            sign, merged = _merge_sign((axis,), idx)
            term = s_diff_safe(c, axis)
            if sign < 0:
                term = sneg(term)
            pos = INDEX_POS[deg][merged]
            out[pos] = sadd(out[pos], term)
    return KForm(deg, tuple(out))


def s_diff_safe(c, axis: int):
    return as_scalar(c).diff(axis)


def interior(x: VectorField, a: KForm) -> KForm:
    """Contraction i_X a; degree drops by one. Errors on 0-forms."""
    if a.degree == 0:
        raise DegreeError("interior product of a 0-form is undefined")
    deg = a.degree - 1
    out = [TrigPoly.zero() for _ in INDEX_SETS[deg]]
    for idx, c in zip(INDEX_SETS[a.degree], a.components):
        for pos_in_idx, axis in enumerate(idx):
            rest = tuple(i for i in idx if i != axis)
            term = smul(x.components[axis], c)
            if pos_in_idx % 2 == 1:
                term = sneg(term)
            pos = INDEX_POS[deg][rest]
            out[pos] = sadd(out[pos], term)
    return KForm(deg, tuple(out))


def lie_derivative(x: VectorField, a: KForm) -> KForm:
    """Cartan's formula: L_X = i_X d + d i_X (just i_X d on functions)."""
    first = interior(x, ext_d(a))
    if a.degree == 0:
        return first
    return first + ext_d(interior(x, a))


def flat(x: VectorField, g: Metric) -> KForm:
    """The 1-form i_X g, i.e. v -> g(X, v)."""
    comps = []
    for j in range(3):
        acc = TrigPoly.zero()
        for i in range(3):
            acc = sadd(acc, smul(g.entry(i, j), x.components[i]))
        comps.append(acc)
    return KForm(1, tuple(comps))


def sharp(a: KForm, g: Metric, grid_n: int = grid.DEFAULT_N) -> VectorField:
    """Inverse of flat: the vector field with flat(sharp(a)) = a."""
    if a.degree != 1:
        raise DegreeError("sharp expects a 1-form")
    if g.positivity_min(grid_n) <= 0:
        raise MetricError("metric is not positive-definite on the verification grid")
    adj = g.adjugate()
    det = g.det()
    comps = []
    for i in range(3):
        acc = TrigPoly.zero()
        for j in range(3):
            acc = sadd(acc, smul(adj[i][j], a.components[j]))
        comps.append(sdiv(acc, det))
    return VectorField(tuple(comps))


def _invert_volume(beta: KForm, density) -> VectorField:
    """The unique W with i_W (density dx^dy^dz) = beta, for a 2-form beta."""
    b01, b02, b12 = beta.components
    return VectorField((sdiv(b12, density),
                        sdiv(sneg(b02), density),
                        sdiv(b01, density)))


def hodge(a: KForm, g: Metric) -> KForm:
    """Hodge star with respect to the metric volume of g (Riemannian signs)."""
    vol = g.volume_form()
    if a.degree == 0:
        return KForm(3, (smul(a.components[0], vol.density),))
    if a.degree == 1:
        return interior(sharp(a, g), vol.as_kform())
    if a.degree == 2:
        return flat(_invert_volume(a, vol.density), g)
    if a.degree == 3:
        return KForm(0, (sdiv(a.components[0], vol.density),))
    raise DegreeError(f"degree {a.degree}")


def curl(x: VectorField, g: Metric, mu: VolumeForm) -> VectorField:
    """The field W with i_W mu = d(i_X g)."""
    eta = ext_d(flat(x, g))
    return _invert_volume(eta, mu.density)


def cross(v: VectorField, w: VectorField, g: Metric) -> VectorField:
    """Metric cross product, fixed by i_{VxW}(vol_g) = flat(V) ^ flat(W)."""
    theta = wedge(flat(v, g), flat(w, g))
    return _invert_volume(theta, g.volume_form().density)


class VolumeReport(NamedTuple):
    preserving: bool
    residual: float
    residual_field: object  # coefficient of d(i_X mu) against dx^dy^dz


def is_volume_preserving(x: VectorField, mu: VolumeForm,
                         grid_n: int = grid.DEFAULT_N,
                         tol: float = 1e-10) -> VolumeReport:
    """L_X mu = 0 check: exact for trig-polynomial data, grid residual else."""
    three = ext_d(interior(x, mu.as_kform()))
    field = three.components[0]
    if s_is_exact_zero(field):
        return VolumeReport(True, 0.0, field)
    res = s_residual_max(field, grid_n)
    return VolumeReport(res <= tol, res, field)
