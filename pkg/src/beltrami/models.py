"""Named model fields and their diagnostics.

Constructors for the ABC family and the helical normal forms on the
3-torus, the one-sided homotopy-triviality certificate built from the unit
direction map into the sphere, and the kinetic energy functional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import grid
from .exprfield import smul, s_eval, s_grad_bound, s_mean
from .forms import KForm, Metric, SingularFieldError, VectorField, VolumeForm
from .trig import TrigPoly

TWO_PI = 2.0 * math.pi


def _frac(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**12)
    return Fraction(v)


@dataclass(frozen=True)
class ABCParams:
    """Coefficients of the ABC family; the usual convention normalizes to
    1 = A >= B >= C >= 0 by permuting coordinates and rescaling time."""

    A: Fraction
    B: Fraction
    C: Fraction

    def __post_init__(self):
        object.__setattr__(self, "A", _frac(self.A))
        object.__setattr__(self, "B", _frac(self.B))
        object.__setattr__(self, "C", _frac(self.C))
        if self.A < 0 or self.B < 0 or self.C < 0:
            raise ValueError("ABC coefficients must be nonnegative")

    @property
    def is_normalized(self) -> bool:
        return self.A == 1 and self.A >= self.B >= self.C >= 0

    def normalized(self) -> "ABCParams":
        """Sort descending and rescale so the leading coefficient is one."""
        a, b, c = sorted((self.A, self.B, self.C), reverse=True)
        if a == 0:
            raise ValueError("cannot normalize the zero triple")
        return ABCParams(Fraction(1), b / a, c / a)


def abc_field(params: "ABCParams | tuple") -> VectorField:
    """(A sin z + C cos y,  B sin x + A cos z,  C sin y + B cos x)."""
    p = params if isinstance(params, ABCParams) else ABCParams(*params)
    return VectorField((
        TrigPoly.sinwave((0, 0, 1), p.A) + TrigPoly.coswave((0, 1, 0), p.C),
        TrigPoly.sinwave((1, 0, 0), p.B) + TrigPoly.coswave((0, 0, 1), p.A),
        TrigPoly.sinwave((0, 1, 0), p.C) + TrigPoly.coswave((1, 0, 0), p.B),
    ))


def abc_nonsingular(params: "ABCParams | tuple") -> bool:
    """Exact rational evaluation of B^2 + C^2 <= 1.

    Only valid in the normalized convention; callers must normalize first.
    """
    p = params if isinstance(params, ABCParams) else ABCParams(*params)
    if not p.is_normalized:
        raise ValueError("nonsingularity criterion needs normalized coefficients "
                         "(1 = A >= B >= C >= 0); call .normalized() first")
    return p.B * p.B + p.C * p.C <= 1


def giroux_form(n: int) -> KForm:
    """The helical contact normal form  sin(nz) dx + cos(nz) dy."""
    if not isinstance(n, int) or n < 1:
        raise ValueError("the normal-form index must be a positive integer")
    return KForm(1, (TrigPoly.sinwave((0, 0, n)),
                     TrigPoly.coswave((0, 0, n)),
                     TrigPoly.zero()))


def giroux_reeb(n: int) -> VectorField:
    """The Reeb field of giroux_form(n): sin(nz) d/dx + cos(nz) d/dy."""
    if not isinstance(n, int) or n < 1:
        raise ValueError("the normal-form index must be a positive integer")
    return VectorField((TrigPoly.sinwave((0, 0, n)),
                        TrigPoly.coswave((0, 0, n)),
                        TrigPoly.zero()))


# -- homotopy-triviality certificate ------------------------------------------------

# 26 lattice directions tried after the negated centroid, fixed order
_LATTICE_DIRECTIONS = tuple(
    (i, j, k)
    for i in (-1, 0, 1) for j in (-1, 0, 1) for k in (-1, 0, 1)
    if (i, j, k) != (0, 0, 0))


@dataclass(frozen=True)
class HomotopyCertificate:
    verdict: str                         # "TRIVIAL" or "INCONCLUSIVE"
    direction: tuple | None              # constant map target; cap sits at -direction
    radius: float | None                 # angular radius of the omitted cap
    resolution: int
    margin: float                        # continuity allowance between samples
    min_norm: float

    @property
    def omitted_cap(self):
        if self.verdict != "TRIVIAL":
            return None
        return (tuple(-c for c in self.direction), self.radius)

    def to_json_dict(self) -> dict:
        out = {
            "check": "gauss",
            "verdict": self.verdict,
            "resolution": self.resolution,
            "margin": self.margin,
            "min_norm": self.min_norm,
        }
        if self.verdict == "TRIVIAL":
            out["direction"] = list(self.direction)
            out["omitted_cap_center"] = [-c for c in self.direction]
            out["omitted_cap_radius"] = self.radius
        return out


def gauss_certificate(x: VectorField, resolution: int = 48) -> HomotopyCertificate:
    """One-sided homotopy triviality via the unit direction map.

    Samples X/|X| on a resolution^3 cell-centered grid and searches for a
    spherical cap the sampled image stays clear of, with a continuity margin
    asin(L * half-cell-diagonal / min |X|) built from the component gradient
    bounds L.  If the image misses the cap around -direction, the field
    deforms through nonvanishing fields to the constant field `direction`,
    so TRIVIAL is sound; the certificate never claims nontriviality.
    """
    pts = grid.points(resolution)
    vals = x.eval(pts)
    norms = np.linalg.norm(vals, axis=-1)
    min_norm = float(np.min(norms))
    if min_norm <= 1e-12:
        raise SingularFieldError("direction map undefined: field vanishes on grid")
    lipschitz = math.sqrt(sum(s_grad_bound(c) ** 2 for c in x.components))
    ratio = lipschitz * grid.half_cell_diagonal(resolution) / min_norm
    margin = math.pi if ratio >= 1.0 else math.asin(ratio)

    dirs = vals / norms[:, None]
    candidates = []
    centroid = dirs.mean(axis=0)
    clen = float(np.linalg.norm(centroid))
    if clen > 1e-9:
        candidates.append(tuple(-centroid / clen))
    for latt in _LATTICE_DIRECTIONS:
        ln = math.sqrt(sum(c * c for c in latt))
        candidates.append(tuple(c / ln for c in latt))

    best = None
    for cap_center in candidates:
        cosines = dirs @ np.asarray(cap_center)
        # smallest angle between a sample and the cap center
        min_angle = float(np.arccos(np.clip(np.max(cosines), -1.0, 1.0)))
        # shaved so the claimed radius clears min_angle - margin strictly
        radius = 0.99 * (min_angle - margin)
        if radius > 0 and (best is None or radius > best[1]):
            best = (cap_center, radius)
    if best is None:
        return HomotopyCertificate("INCONCLUSIVE", None, None, resolution,
                                   margin, min_norm)
    cap_center, radius = best
    direction = tuple(float(-c) for c in cap_center)
    return HomotopyCertificate("TRIVIAL", direction, radius, resolution,
                               margin, min_norm)


# -- energy ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnergyResult:
    total: float                 # (1/2) * integral of |X|^2 over the torus
    mean_coefficient: object     # exact Fraction when the integrand stays trig
    exact: bool

    def to_json_dict(self) -> dict:
        return {
            "check": "energy",
            "total": self.total,
            "mean_coefficient": str(self.mean_coefficient) if self.exact
            else self.mean_coefficient,
            "exact": self.exact,
        }


def energy(x: VectorField, g: Metric, mu: VolumeForm,
           quad_n: int = 64) -> EnergyResult:
    """Kinetic energy (1/2) int |X|^2 dmu = (1/2) (2 pi)^3 mean(|X|^2 rho).

    Exact mean extraction when the integrand is a trig polynomial, midpoint
    quadrature on quad_n^3 cells otherwise.
    """
    integrand = smul(x.norm_sq(g), mu.density)
    if isinstance(integrand, TrigPoly):
        mean = integrand.mean()
        return EnergyResult(0.5 * TWO_PI ** 3 * float(mean), mean, True)
    mean = float(np.mean(s_eval(integrand, grid.points(quad_n))))
    return EnergyResult(0.5 * TWO_PI ** 3 * mean, mean, False)
