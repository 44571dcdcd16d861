"""Closed-form scalar fields that leave the trig-polynomial class.

An :class:`ExprField` is an immutable expression tree over
:class:`~beltrami.trig.TrigPoly` leaves with nodes ``+ - * / sqrt ^``.
Trees whose value stays inside the trig-polynomial class are folded back
to a :class:`TrigPoly` by the smart constructors below, so callers can mix
the two types freely through the ``s*`` helpers.

Every division node carries a nonvanishing witness for its denominator and
every square root a nonnegativity witness: the minimum over the verification
grid, plus a flag saying whether the margin test (grid minimum exceeding
twice the estimated gradient bound times the half-cell diagonal) holds.
A passing margin test rules out zeros between samples; without it the
witness is a sample-based certificate only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import grid
from .trig import TrigPoly

WITNESS_TOL = 1e-9
WITNESS_GRID_N = 32

Scalar = "TrigPoly | ExprField"


class WitnessError(ValueError):
    """A division or square root lacks a usable grid witness."""


@dataclass(frozen=True)
class Witness:
    kind: str              # "nonvanishing" or "nonnegative"
    grid_n: int
    min_value: float       # min |den| resp. min value over the grid
    margin: float          # 2 * grad bound * half-cell diagonal
    certified: bool        # min_value > margin
    ok: bool               # min_value > WITNESS_TOL


def _exact_sqrt(c: Fraction) -> Fraction | None:
    if c < 0:
        return None
    num, den = c.numerator, c.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


class ExprField:
    """Expression tree over trig-polynomial leaves. Immutable."""

    __slots__ = ("op", "args", "poly", "exponent", "_witness", "_bounds")

    def __init__(self, op, args=(), poly=None, exponent=None):
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "args", tuple(args))
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "exponent", exponent)
        object.__setattr__(self, "_witness", None)
        object.__setattr__(self, "_bounds", None)

    # -- structural equality (caches excluded) ------------------------------

    def __eq__(self, other):
        if isinstance(other, TrigPoly):
            folded = self.maybe_trigpoly()
            return folded == other if folded is not None else False
        if not isinstance(other, ExprField):
            return NotImplemented
        return (self.op == other.op and self.exponent == other.exponent
                and self.poly == other.poly and self.args == other.args)

    __hash__ = None

    def __repr__(self):
        if self.op == "poly":
            return f"ExprField<{self.poly!r}>"
        return f"ExprField<{self.op}/{len(self.args)}>"

    # -- arithmetic sugar ----------------------------------------------------

    def __add__(self, other):
        return sadd(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return ssub(self, other)

    def __rsub__(self, other):
        return ssub(other, self)

    def __mul__(self, other):
        return smul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return sdiv(self, other)

    def __rtruediv__(self, other):
        return sdiv(other, self)

    def __neg__(self):
        return sneg(self)

    def __pow__(self, n):
        return spow(self, n)

    # -- folding -------------------------------------------------------------

    def maybe_trigpoly(self) -> TrigPoly | None:
        """Fold back to a TrigPoly when the tree never left the class."""
        if self.op == "poly":
            return self.poly
        folded = [a.maybe_trigpoly() for a in self.args]
        if any(f is None for f in folded):
            return None
        if self.op == "add":
            return folded[0] + folded[1]
        if self.op == "sub":
            return folded[0] - folded[1]
        if self.op == "mul":
            return folded[0] * folded[1]
        if self.op == "neg":
            return -folded[0]
        if self.op == "div":
            if folded[1].is_constant():
                return folded[0] / folded[1].constant_value()
            return None
        if self.op == "sqrt":
            if folded[0].is_constant():
                c = folded[0].constant_value()
                if isinstance(c, Fraction):
                    r = _exact_sqrt(c)
                    return TrigPoly.constant(r) if r is not None else None
                return TrigPoly.constant(math.sqrt(c)) if c >= 0 else None
            return None
        if self.op == "pow":
            if self.exponent >= 0:
                return folded[0] ** self.exponent
            return None
        raise AssertionError(f"unknown op {self.op}")

    # -- witnesses and bounds --------------------------------------------------

    @property
    def witness(self) -> Witness | None:
        """Grid witness for div (nonvanishing) / sqrt (nonnegative) nodes."""
        if self.op not in ("div", "sqrt"):
            return None
        cached = self._witness
        if cached is None:
            target = self.args[1] if self.op == "div" else self.args[0]
            values = target.eval(grid.points(WITNESS_GRID_N))
            gb = target.grad_bound()
            margin = 2.0 * gb * grid.half_cell_diagonal(WITNESS_GRID_N)
            if self.op == "div":
                mv = grid.min_abs(values)
                kind = "nonvanishing"
            else:
                mv = float(np.min(values))
                kind = "nonnegative"
            cached = Witness(kind=kind, grid_n=WITNESS_GRID_N, min_value=mv,
                             margin=margin, certified=mv > margin,
                             ok=mv > WITNESS_TOL)
            object.__setattr__(self, "_witness", cached)
        return cached

    def require_witness(self) -> Witness:
        w = self.witness
        if w is None or not w.ok:
            raise WitnessError(
                f"{self.op} node lacks a nonvanishing witness "
                f"(grid min {w.min_value:.3e} <= {WITNESS_TOL:g})" if w else
                f"{self.op} node has no witness")
        return w

    def sup_bound(self) -> float:
        return self._get_bounds()[0]

    def grad_bound(self) -> float:
        return self._get_bounds()[1]

    def _get_bounds(self):
        """(sup, grad) estimates; denominators use grid minima, so the
        results are certificate-grade, not proofs."""
        cached = self._bounds
        if cached is not None:
            return cached
        op = self.op
        if op == "poly":
            out = (float(abs(self.poly.mean()) + self.poly.l1_tail()),
                   self.poly.grad_bound())
        elif op in ("add", "sub"):
            sa, ga = self.args[0]._get_bounds()
            sb, gb = self.args[1]._get_bounds()
            out = (sa + sb, ga + gb)
        elif op == "neg":
            out = self.args[0]._get_bounds()
        elif op == "mul":
            sa, ga = self.args[0]._get_bounds()
            sb, gb = self.args[1]._get_bounds()
            out = (sa * sb, sa * gb + sb * ga)
        elif op == "div":
            sa, ga = self.args[0]._get_bounds()
            _sb, gb = self.args[1]._get_bounds()
            m = self.witness.min_value
            if m <= 0:
                out = (math.inf, math.inf)
            else:
                out = (sa / m, ga / m + sa * gb / (m * m))
        elif op == "sqrt":
            sa, ga = self.args[0]._get_bounds()
            m = self.witness.min_value
            if m <= 0:
                out = (math.sqrt(max(sa, 0.0)), math.inf)
            else:
                out = (math.sqrt(sa), ga / (2.0 * math.sqrt(m)))
        elif op == "pow":
            sa, ga = self.args[0]._get_bounds()
            n = self.exponent
            out = (sa ** n, n * sa ** (n - 1) * ga if n >= 1 else math.inf)
        else:
            raise AssertionError(op)
        object.__setattr__(self, "_bounds", out)
        return out

    # -- calculus / evaluation -------------------------------------------------

    def diff(self, axis: int):
        op = self.op
        if op == "poly":
            return self.poly.diff(axis)
        if op == "add":
            return sadd(self.args[0].diff(axis), self.args[1].diff(axis))
        if op == "sub":
            return ssub(self.args[0].diff(axis), self.args[1].diff(axis))
        if op == "neg":
            return sneg(self.args[0].diff(axis))
        if op == "mul":
            u, v = self.args
            return sadd(smul(u.diff(axis), v), smul(u, v.diff(axis)))
        if op == "div":
            u, v = self.args
            num = ssub(smul(u.diff(axis), v), smul(u, v.diff(axis)))
            return sdiv(num, smul(v, v))
        if op == "sqrt":
            u = self.args[0]
            return sdiv(u.diff(axis), smul(2, ExprField("sqrt", (u,))))
        if op == "pow":
            u, n = self.args[0], self.exponent
            return smul(smul(n, spow(u, n - 1)), u.diff(axis))
        raise AssertionError(op)

    def eval(self, points):
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        flat = pts.reshape(-1, 3)
        out = self._eval_flat(flat)
        if single:
            return float(out[0])
        return out.reshape(pts.shape[:-1])

    def _eval_flat(self, flat: np.ndarray) -> np.ndarray:
        op = self.op
        if op == "poly":
            return np.asarray(self.poly.eval(flat), dtype=float).reshape(-1)
        if op == "add":
            return self.args[0]._eval_flat(flat) + self.args[1]._eval_flat(flat)
        if op == "sub":
            return self.args[0]._eval_flat(flat) - self.args[1]._eval_flat(flat)
        if op == "neg":
            return -self.args[0]._eval_flat(flat)
        if op == "mul":
            return self.args[0]._eval_flat(flat) * self.args[1]._eval_flat(flat)
        if op == "div":
            return self.args[0]._eval_flat(flat) / self.args[1]._eval_flat(flat)
        if op == "sqrt":
            return np.sqrt(self.args[0]._eval_flat(flat))
        if op == "pow":
            return self.args[0]._eval_flat(flat) ** self.exponent
        raise AssertionError(op)

    def compiled(self):
        """Scalar float evaluator mirroring :meth:`TrigPoly.compiled`."""
        op = self.op
        if op == "poly":
            return self.poly.compiled()
        fns = [a.compiled() for a in self.args]
        if op == "add":
            fa, fb = fns
            return lambda x, y, z: fa(x, y, z) + fb(x, y, z)
        if op == "sub":
            fa, fb = fns
            return lambda x, y, z: fa(x, y, z) - fb(x, y, z)
        if op == "neg":
            fa, = fns
            return lambda x, y, z: -fa(x, y, z)
        if op == "mul":
            fa, fb = fns
            return lambda x, y, z: fa(x, y, z) * fb(x, y, z)
        if op == "div":
            fa, fb = fns
            return lambda x, y, z: fa(x, y, z) / fb(x, y, z)
        if op == "sqrt":
            fa, = fns
            return lambda x, y, z: math.sqrt(fa(x, y, z))
        if op == "pow":
            fa, = fns
            n = self.exponent
            return lambda x, y, z: fa(x, y, z) ** n
        raise AssertionError(op)


# -- generic scalar helpers (TrigPoly | ExprField | number) --------------------


def as_scalar(v):
    if isinstance(v, (TrigPoly, ExprField)):
        return v
    if isinstance(v, (int, Fraction, float)):
        return TrigPoly.constant(v)
    raise TypeError(f"not a scalar field: {type(v).__name__}")


def lift(v) -> ExprField:
    v = as_scalar(v)
    if isinstance(v, TrigPoly):
        return ExprField("poly", poly=v)
    return v


def sadd(a, b):
    a, b = as_scalar(a), as_scalar(b)
    if isinstance(a, TrigPoly) and isinstance(b, TrigPoly):
        return a + b
    if isinstance(a, TrigPoly) and a.is_zero():
        return b
    if isinstance(b, TrigPoly) and b.is_zero():
        return a
    return ExprField("add", (lift(a), lift(b)))


def ssub(a, b):
    a, b = as_scalar(a), as_scalar(b)
    if isinstance(a, TrigPoly) and isinstance(b, TrigPoly):
        return a - b
    if isinstance(b, TrigPoly) and b.is_zero():
        return a
    return ExprField("sub", (lift(a), lift(b)))


def sneg(a):
    a = as_scalar(a)
    if isinstance(a, TrigPoly):
        return -a
    return ExprField("neg", (a,))


def smul(a, b):
    a, b = as_scalar(a), as_scalar(b)
    if isinstance(a, TrigPoly) and isinstance(b, TrigPoly):
        return a * b
    for u, v in ((a, b), (b, a)):
        if isinstance(u, TrigPoly) and u.is_constant():
            c = u.constant_value()
            if c == 0:
                return TrigPoly.zero()
            if c == 1:
                return v
    return ExprField("mul", (lift(a), lift(b)))


def sdiv(a, b):
    a, b = as_scalar(a), as_scalar(b)
    if isinstance(b, TrigPoly) and b.is_constant():
        c = b.constant_value()
        if c == 0:
            raise ZeroDivisionError("division by the zero field")
        if isinstance(a, TrigPoly):
            return a / c
        return smul(a, Fraction(1) / c if isinstance(c, Fraction) else 1.0 / c)
    if isinstance(a, TrigPoly) and a.is_zero():
        return TrigPoly.zero()
    return ExprField("div", (lift(a), lift(b)))


def ssqrt(a):
    a = as_scalar(a)
    if isinstance(a, TrigPoly) and a.is_constant():
        c = a.constant_value()
        if isinstance(c, Fraction):
            r = _exact_sqrt(c)
            if r is not None:
                return TrigPoly.constant(r)
        elif c >= 0:
            return TrigPoly.constant(math.sqrt(c))
    return ExprField("sqrt", (lift(a),))


def spow(a, n: int):
    if not isinstance(n, int):
        raise TypeError("powers must be integers")
    a = as_scalar(a)
    if n < 0:
        return sdiv(1, spow(a, -n))
    if isinstance(a, TrigPoly):
        return a ** n
    return ExprField("pow", (a,), exponent=n)


def s_eval(f, points):
    return as_scalar(f).eval(points)


def s_diff(f, axis: int):
    return as_scalar(f).diff(axis)


def s_is_exact_zero(f) -> bool:
    f = as_scalar(f)
    if isinstance(f, TrigPoly):
        return f.is_zero()
    folded = f.maybe_trigpoly()
    return folded is not None and folded.is_zero()


def s_residual_max(f, grid_n: int = grid.DEFAULT_N) -> float:
    """Max |f| over the verification grid; exact zero short-circuits to 0."""
    if s_is_exact_zero(f):
        return 0.0
    return grid.max_abs(s_eval(f, grid.points(grid_n)))


def s_mean(f, grid_n: int = 64):
    """Torus average: exact for TrigPoly, midpoint quadrature otherwise."""
    f = as_scalar(f)
    if isinstance(f, TrigPoly):
        return f.mean()
    folded = f.maybe_trigpoly()
    if folded is not None:
        return folded.mean()
    return float(np.mean(f.eval(grid.points(grid_n))))


def s_sup_bound(f) -> float:
    f = as_scalar(f)
    if isinstance(f, TrigPoly):
        return float(abs(f.mean()) + f.l1_tail())
    return f.sup_bound()


def s_grad_bound(f) -> float:
    return as_scalar(f).grad_bound()
