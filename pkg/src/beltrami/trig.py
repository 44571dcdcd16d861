"""Exact trigonometric polynomials on the flat 3-torus.

A :class:`TrigPoly` is a finite Fourier sum

    p(x) = sum_k  a_k cos(k . x) + b_k sin(k . x),      x in [0, 2*pi)^3,

with integer mode vectors ``k`` and exact rational coefficients (floats are
also accepted and propagate through the arithmetic, trading exactness for
speed).  Sums, differences, products (via product-to-sum identities) and
partial derivatives stay inside the class, which makes identity checks on
the torus decidable by coefficient comparison.

Canonical form
--------------
* no zero-coefficient terms are stored;
* ``sin`` with the zero mode is never stored (it is identically zero);
* each stored mode is the representative of {k, -k} whose first nonzero
  entry is positive; a sin term flips sign when the mode is negated.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union

import numpy as np

COS = 0
SIN = 1

Mode = tuple[int, int, int]
Coeff = Union[Fraction, float]

ZERO_MODE: Mode = (0, 0, 0)

_TWO_PI = 2.0 * math.pi


def _coerce_coeff(c) -> Coeff:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, float):
        return c
    raise TypeError(f"unsupported coefficient type: {type(c).__name__}")


def _canonical_term(k, parity: int, coeff: Coeff):
    """Map a raw term onto the canonical representative, or None if it dies."""
    k = (int(k[0]), int(k[1]), int(k[2]))
    if k == ZERO_MODE:
        if parity == SIN:
            return None
        return k, COS, coeff
    for comp in k:
        if comp > 0:
            return k, parity, coeff
        if comp < 0:
            nk = (-k[0], -k[1], -k[2])
            if parity == SIN:
                return nk, SIN, -coeff
            return nk, COS, coeff
    raise AssertionError("unreachable")


def _accumulate(acc: dict, k, parity: int, coeff: Coeff) -> None:
    term = _canonical_term(k, parity, coeff)
    if term is None:
        return
    key = (term[0], term[1])
    cur = acc.get(key)
    acc[key] = term[2] if cur is None else cur + term[2]


class TrigPoly:
    """Immutable trigonometric polynomial on the 3-torus."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for (k, parity), coeff in items:
            _accumulate(acc, k, parity, _coerce_coeff(coeff))
        object.__setattr__(self, "_terms", {key: c for key, c in acc.items() if c != 0})

    @classmethod
    def _raw(cls, canonical_terms: dict) -> "TrigPoly":
        p = cls.__new__(cls)
        object.__setattr__(p, "_terms", canonical_terms)
        return p

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, c) -> "TrigPoly":
        c = _coerce_coeff(c)
        return cls._raw({} if c == 0 else {(ZERO_MODE, COS): c})

    @classmethod
    def zero(cls) -> "TrigPoly":
        return cls._raw({})

    @classmethod
    def one(cls) -> "TrigPoly":
        return cls.constant(1)

    @classmethod
    def coswave(cls, k, coeff=1) -> "TrigPoly":
        return cls([((tuple(k), COS), coeff)])

    @classmethod
    def sinwave(cls, k, coeff=1) -> "TrigPoly":
        return cls([((tuple(k), SIN), coeff)])

    # -- inspection --------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def coefficient(self, k, parity: int) -> Coeff:
        term = _canonical_term(tuple(k), parity, Fraction(1))
        if term is None:
            return Fraction(0)
        sign = term[2]
        return sign * self._terms.get((term[0], term[1]), Fraction(0))

    def mean(self) -> Coeff:
        """Average over the torus: the cosine coefficient of the zero mode."""
        return self._terms.get((ZERO_MODE, COS), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(k == ZERO_MODE for (k, _p) in self._terms)

    def constant_value(self) -> Coeff:
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return self.mean()

    def max_mode(self) -> int:
        return max((max(abs(c) for c in k) for (k, _p) in self._terms), default=0)

    def has_float_coeffs(self) -> bool:
        return any(isinstance(c, float) for c in self._terms.values())

    def sorted_terms(self) -> list:
        return sorted(self._terms.items(), key=lambda item: (item[0][0], item[0][1]))

    # -- bounds (exact for rational coefficients) --------------------------

    def l1_tail(self) -> Coeff:
        """Sum of |coefficients| over all nonzero modes."""
        return sum((abs(c) for (k, _p), c in self._terms.items() if k != ZERO_MODE),
                   Fraction(0))

    def lower_bound(self) -> Coeff:
        """A certified lower bound: mean minus the l1 tail."""
        return self.mean() - self.l1_tail()

    def upper_bound(self) -> Coeff:
        return self.mean() + self.l1_tail()

    def grad_bound(self) -> float:
        """Upper bound on the Euclidean norm of the gradient."""
        per_axis = [Fraction(0)] * 3
        for (k, _p), c in self._terms.items():
            a = abs(c)
            for i in range(3):
                per_axis[i] += a * abs(k[i])
        return math.sqrt(sum(float(g) ** 2 for g in per_axis))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, TrigPoly):
            acc = dict(self._terms)
            for key, c in other._terms.items():
                cur = acc.get(key)
                s = c if cur is None else cur + c
                if s == 0:
                    acc.pop(key, None)
                else:
                    acc[key] = s
            return TrigPoly._raw(acc)
        if isinstance(other, (int, Fraction, float)):
            return self + TrigPoly.constant(other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly._raw({key: -c for key, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, TrigPoly):
            return self + (-other)
        if isinstance(other, (int, Fraction, float)):
            return self + TrigPoly.constant(-_coerce_coeff(other))
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, float)):
            c = _coerce_coeff(other)
            if c == 0:
                return TrigPoly.zero()
            return TrigPoly._raw({key: v * c for key, v in self._terms.items()})
        if not isinstance(other, TrigPoly):
            return NotImplemented
        half = Fraction(1, 2)
        acc: dict = {}
        for (ka, pa), ca in self._terms.items():
            for (kb, pb), cb in other._terms.items():
                c = ca * cb * half
                ksum = (ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2])
                kdif = (ka[0] - kb[0], ka[1] - kb[1], ka[2] - kb[2])
                if pa == COS and pb == COS:
                    _accumulate(acc, kdif, COS, c)
                    _accumulate(acc, ksum, COS, c)
                elif pa == SIN and pb == SIN:
                    _accumulate(acc, kdif, COS, c)
                    _accumulate(acc, ksum, COS, -c)
                elif pa == SIN and pb == COS:
                    _accumulate(acc, ksum, SIN, c)
                    _accumulate(acc, kdif, SIN, c)
                else:  # COS * SIN
                    _accumulate(acc, ksum, SIN, c)
                    _accumulate(acc, kdif, SIN, -c)
        return TrigPoly._raw({key: c for key, c in acc.items() if c != 0})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, float)):
            c = _coerce_coeff(other)
            if c == 0:
                raise ZeroDivisionError("division of TrigPoly by zero constant")
            inv = Fraction(1) / c if isinstance(c, Fraction) else 1.0 / c
            return self * inv
        if isinstance(other, TrigPoly):
            if other.is_constant():
                return self / other.constant_value()
            from . import exprfield  # deferred: avoids an import cycle
            return exprfield.sdiv(self, other)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("TrigPoly powers must be nonnegative integers")
        out = TrigPoly.one()
        for _ in range(n):
            out = out * self
        return out

    # -- calculus ----------------------------------------------------------

    def diff(self, axis: int) -> "TrigPoly":
        """Exact partial derivative along coordinate ``axis`` (0, 1 or 2)."""
        acc: dict = {}
        for (k, parity), c in self._terms.items():
            ki = k[axis]
            if ki == 0:
                continue
            if parity == COS:
                _accumulate(acc, k, SIN, -c * ki)
            else:
                _accumulate(acc, k, COS, c * ki)
        return TrigPoly._raw({key: c for key, c in acc.items() if c != 0})

    def shift(self, offsets) -> "TrigPoly":
        """Translate coordinates x -> x + offsets (float coefficients)."""
        ox, oy, oz = (float(o) for o in offsets)
        acc: dict = {}
        for (k, parity), c in self._terms.items():
            phase = k[0] * ox + k[1] * oy + k[2] * oz
            cp, sp = math.cos(phase), math.sin(phase)
            fc = float(c)
            if parity == COS:
                # cos(k.x + phase) = cos(k.x) cos(phase) - sin(k.x) sin(phase)
                _accumulate(acc, k, COS, fc * cp)
                _accumulate(acc, k, SIN, -fc * sp)
            else:
                _accumulate(acc, k, SIN, fc * cp)
                _accumulate(acc, k, COS, fc * sp)
        return TrigPoly._raw({key: c for key, c in acc.items() if c != 0})

    # -- evaluation --------------------------------------------------------

    def eval(self, points):
        """Evaluate at one point (shape ``(3,)``) or many (shape ``(..., 3)``)."""
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        flat = pts.reshape(-1, 3)
        out = np.zeros(flat.shape[0])
        for (k, parity), c in self._terms.items():
            phase = flat @ np.asarray(k, dtype=float)
            out += float(c) * (np.cos(phase) if parity == COS else np.sin(phase))
        if single:
            return float(out[0])
        return out.reshape(pts.shape[:-1])

    def compiled(self) -> Callable[[float, float, float], float]:
        """A fast scalar evaluator for tight inner loops (ODE right sides)."""
        cos_terms = [(float(c), k) for (k, p), c in self._terms.items() if p == COS]
        sin_terms = [(float(c), k) for (k, p), c in self._terms.items() if p == SIN]
        mcos, msin = math.cos, math.sin

        def f(x: float, y: float, z: float) -> float:
            v = 0.0
            for c, (i, j, l) in cos_terms:
                v += c * mcos(i * x + j * y + l * z)
            for c, (i, j, l) in sin_terms:
                v += c * msin(i * x + j * y + l * z)
            return v

        return f

    # -- comparison / display ----------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, float)):
            other = TrigPoly.constant(other)
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        if not self._terms:
            return "TrigPoly<0>"
        bits = []
        for (k, parity), c in self.sorted_terms():
            if k == ZERO_MODE:
                bits.append(str(c))
                continue
            phase = "+".join(
                f"{'' if abs(comp) == 1 else abs(comp)}{'xyz'[i]}" if comp > 0
                else f"-{'' if abs(comp) == 1 else abs(comp)}{'xyz'[i]}"
                for i, comp in enumerate(k) if comp
            ).replace("+-", "-")
            fn = "cos" if parity == COS else "sin"
            coeff = "" if c == 1 else ("-" if c == -1 else f"{c}*")
            bits.append(f"{coeff}{fn}({phase})")
        return "TrigPoly<" + " + ".join(bits).replace("+ -", "- ") + ">"


def pointwise(expr: Callable[[float, float, float], float], point) -> float:
    """Evaluate a plain float formula at a point; used as an independent oracle."""
    x, y, z = (float(v) for v in point)
    return expr(x, y, z)
