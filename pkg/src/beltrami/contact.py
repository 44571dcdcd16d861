"""Beltrami detection, contact verification, Reeb extraction and the
steady-Euler check, plus the adapted-metric construction that turns a Reeb
pair back into a curl eigenfield.

Conventions fixed here and used everywhere:

* colinearity of a field with its curl is decided by the exact wedge test
  flat(X) ^ flat(curl X) = 0, with the proportionality factor extracted
  afterwards (no division branches on the exact path);
* the 1-form fed to the pressure recovery is  beta = -i_X i_W vol_g  with
  W = curl(X, g, mu) and vol_g the metric volume of g.  This is the usual
  Riemannian cross-product convention written so that the shear flow
  (sin y, 0, 0) produces beta = sin y cos y dy; flipping the orientation of
  the volume flips beta;
* all grid verdicts are certificates over the cell-centered verification
  lattice, not proofs.  Exactness claims apply to trig-polynomial data only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import grid
from .exprfield import (ExprField, WitnessError, as_scalar, sadd, sdiv, smul,
                        sneg, ssub, s_eval, s_is_exact_zero, s_residual_max)
from .forms import (KForm, Metric, SingularFieldError, VectorField, VolumeForm,
                    VolumeReport, coordinate_field, cross_euclidean,
                    euclidean_metric, ext_d, flat, interior, is_volume_preserving,
                    wedge, curl)
from .trig import TrigPoly

SINGULAR_TOL = 1e-9
CONTACT_TOL = 1e-9
FACTOR_SIGN_TOL = 1e-9


class BeltramiStatus(str, enum.Enum):
    ROTATIONAL = "ROTATIONAL"
    CURL_FREE = "CURL_FREE"
    NON_BELTRAMI = "NON_BELTRAMI"
    MIXED = "MIXED"


class ContactVerdict(str, enum.Enum):
    CONTACT = "CONTACT"
    DEGENERATE = "DEGENERATE"


class EulerVerdict(str, enum.Enum):
    STEADY_EULER = "STEADY_EULER"
    NOT_EULER = "NOT_EULER"


class NotRotationalError(ValueError):
    pass


class DegenerateFormError(ValueError):
    pass


class WrongStatusError(ValueError):
    pass


def _serialize_scalar(s):
    from . import dsl
    return dsl.serialize_scalar(s)


def _num(v):
    """JSON-friendly number: exact rationals as strings, floats as floats."""
    if isinstance(v, Fraction):
        return str(v)
    return v


# -- Beltrami detection ----------------------------------------------------------


@dataclass
class BeltramiReport:
    status: BeltramiStatus
    factor: object | None            # scalar field, or None for NON_BELTRAMI
    factor_constant: object | None   # Fraction/float when the factor is constant
    residual: float                  # max |curl X - f X| over the grid
    colinearity_residual: float      # max wedge-test residual (0 when exact)
    factor_integral_residual: float  # max |i_X df| (0 when exact)
    factor_min: float
    factor_max: float
    nonsingularity_min: float
    grid_n: int

    def positive(self) -> bool:
        """True when the field is parallel to its curl at all."""
        return self.status is not BeltramiStatus.NON_BELTRAMI

    def to_json_dict(self) -> dict:
        return {
            "check": "beltrami",
            "status": self.status.value,
            "factor": None if self.factor is None else _serialize_scalar(self.factor),
            "factor_constant": None if self.factor_constant is None
            else _num(self.factor_constant),
            "residual": self.residual,
            "colinearity_residual": self.colinearity_residual,
            "factor_integral_residual": self.factor_integral_residual,
            "factor_min": self.factor_min,
            "factor_max": self.factor_max,
            "nonsingularity_min": self.nonsingularity_min,
            "grid_n": self.grid_n,
        }


def _constant_factor_candidate(x: VectorField, w: VectorField):
    """Try exact extraction of a constant f with curl X = f X."""
    best = None
    for xc, wc in zip(x.components, w.components):
        if not isinstance(xc, TrigPoly) or not isinstance(wc, TrigPoly):
            return None
        for key, c in xc.terms.items():
            if best is None or abs(c) > abs(best[2]):
                best = (xc, wc, c, key)
    if best is None:
        return None
    xc, wc, c, key = best
    cand = wc.terms.get(key, Fraction(0)) / c
    for xc, wc in zip(x.components, w.components):
        if not (wc - cand * xc).is_zero():
            return None
    return cand


def beltrami_factor(x: VectorField, g: Metric, mu: VolumeForm,
                    grid_n: int = grid.DEFAULT_N) -> BeltramiReport:
    """Classify X against the parallel-to-curl condition curl X = f X."""
    ns_min = x.nonsingularity_min(g, grid_n)
    if ns_min <= SINGULAR_TOL:
        raise SingularFieldError(
            f"field is singular on the verification grid (min |X|^2 = {ns_min:.3e})")
    w = curl(x, g, mu)

    if all(s_is_exact_zero(c) for c in w.components):
        zero = TrigPoly.zero()
        return BeltramiReport(BeltramiStatus.CURL_FREE, zero, Fraction(0),
                              0.0, 0.0, 0.0, 0.0, 0.0, ns_min, grid_n)

    wtest = wedge(flat(x, g), flat(w, g))
    colin = wtest.residual_max(grid_n)

    pts = grid.points(grid_n)
    xv = x.eval(pts)
    wv = w.eval(pts)
    # componentwise ratio, using the largest-magnitude component pointwise
    pick = np.argmax(np.abs(xv), axis=-1)
    rows = np.arange(len(pts))
    fvals = wv[rows, pick] / xv[rows, pick]
    residual = float(np.max(np.abs(wv - fvals[:, None] * xv)))

    if colin > 1e-8:
        return BeltramiReport(BeltramiStatus.NON_BELTRAMI, None, None,
                              residual, colin, 0.0,
                              float(np.min(fvals)), float(np.max(fvals)),
                              ns_min, grid_n)

    cand = _constant_factor_candidate(x, w)
    if cand is not None:
        status = (BeltramiStatus.ROTATIONAL if cand != 0
                  else BeltramiStatus.CURL_FREE)
        return BeltramiReport(status, TrigPoly.constant(cand), cand,
                              0.0, colin, 0.0, float(cand), float(cand),
                              ns_min, grid_n)

    # nonconstant factor: report the smooth ratio g(W, X) / g(X, X)
    inner = TrigPoly.zero()
    wflat = flat(w, g)
    for i in range(3):
        inner = sadd(inner, smul(wflat.components[i], x.components[i]))
    f_field = sdiv(inner, x.norm_sq(g))
    fmin, fmax = float(np.min(fvals)), float(np.max(fvals))
    if fmin > FACTOR_SIGN_TOL or fmax < -FACTOR_SIGN_TOL:
        status = BeltramiStatus.ROTATIONAL
    else:
        status = BeltramiStatus.MIXED
    # i_X df residual, via the symbolic derivative of the ratio
    df = [f_field.diff(axis) for axis in range(3)]
    ires = TrigPoly.zero()
    for axis in range(3):
        ires = sadd(ires, smul(x.components[axis], df[axis]))
    integral_res = s_residual_max(ires, grid_n)
    return BeltramiReport(status, f_field, None, residual, colin,
                          integral_res, fmin, fmax, ns_min, grid_n)


# -- contact forms ----------------------------------------------------------------


@dataclass
class ContactReport:
    alpha: KForm
    density: object
    verdict: ContactVerdict
    min_abs_density: float
    certificate: dict
    reeb_like: "ReebReport | None" = None

    def to_json_dict(self) -> dict:
        out = {
            "check": "contact",
            "verdict": self.verdict.value,
            "density": _serialize_scalar(self.density),
            "min_abs_density": self.min_abs_density,
            "certificate": self.certificate,
        }
        if self.reeb_like is not None:
            out["reeb_like"] = self.reeb_like.to_json_dict()
        return out


def is_contact(alpha: KForm, grid_n: int = grid.DEFAULT_N) -> ContactReport:
    """Is alpha ^ d(alpha) a volume form?  Certificate over the grid, with an
    exact coefficient-bound shortcut when the density is a trig polynomial."""
    if alpha.degree != 1:
        raise DegenerateFormError("contact check expects a 1-form")
    density = wedge(alpha, ext_d(alpha)).components[0]
    if isinstance(density, TrigPoly):
        lo, hi = density.lower_bound(), density.upper_bound()
        if lo > 0 or hi < 0:
            m = float(min(abs(lo), abs(hi)))
            cert = {"kind": "exact-coefficient-bound", "lower_bound": _num(min(abs(lo), abs(hi)))}
            return ContactReport(alpha, density, ContactVerdict.CONTACT, m, cert)
        if density.is_zero():
            return ContactReport(alpha, density, ContactVerdict.DEGENERATE, 0.0,
                                 {"kind": "exact-zero"})
    vals = s_eval(density, grid.points(grid_n))
    const_sign = bool(np.all(vals > CONTACT_TOL) or np.all(vals < -CONTACT_TOL))
    m = grid.min_abs(vals)
    cert = {"kind": "grid", "grid_n": grid_n, "constant_sign": const_sign}
    verdict = ContactVerdict.CONTACT if const_sign else ContactVerdict.DEGENERATE
    return ContactReport(alpha, density, verdict, m, cert)


# -- Reeb fields -------------------------------------------------------------------


@dataclass
class ReebReport:
    ok: bool
    strict: bool
    d_alpha_residual: float       # max |i_X d alpha|
    pairing_residual: float       # strict: max |i_X alpha - 1|
    pairing_min: float            # relaxed: grid min of i_X alpha
    pairing_exact: bool

    def to_json_dict(self) -> dict:
        return {
            "check": "reeb",
            "ok": self.ok,
            "mode": "strict" if self.strict else "relaxed",
            "d_alpha_residual": self.d_alpha_residual,
            "pairing_residual": self.pairing_residual,
            "pairing_min": self.pairing_min,
            "pairing_exact": self.pairing_exact,
        }


def verify_reeb(alpha: KForm, x: VectorField, strict: bool = True,
                grid_n: int = grid.DEFAULT_N,
                tol: float = 1e-10) -> ReebReport:
    """Check i_X d(alpha) = 0 plus the normalization i_X alpha = 1 (strict)
    or the positivity of i_X alpha (relaxed)."""
    report = is_contact(alpha, grid_n)
    if report.verdict is not ContactVerdict.CONTACT:
        raise DegenerateFormError("form is not contact on the verification grid")
    dres = interior(x, ext_d(alpha)).residual_max(grid_n)
    pairing = interior(x, alpha).components[0]
    if strict:
        gap = sadd(pairing, TrigPoly.constant(-1))
        exact = s_is_exact_zero(gap)
        pres = 0.0 if exact else s_residual_max(gap, grid_n)
        ok = dres <= tol and pres <= tol
        pmin = 1.0 - pres
        return ReebReport(ok, True, dres, pres, pmin, exact)
    if isinstance(pairing, TrigPoly) and pairing.lower_bound() > 0:
        pmin = float(pairing.lower_bound())
        exact = True
    else:
        pmin = float(np.min(s_eval(pairing, grid.points(grid_n))))
        exact = False
    ok = dres <= tol and pmin > SINGULAR_TOL
    return ReebReport(ok, False, dres, 0.0, pmin, exact)


def reeb_field(alpha: KForm, grid_n: int = grid.DEFAULT_N) -> VectorField:
    """The unique X with i_X d(alpha) = 0, i_X alpha = 1.

    Solving the pointwise 3x3 system by adjugate division collapses to
    X = V / density, where i_V (dx^dy^dz) = d(alpha) and the system
    determinant is the contact density.  Exact when the density is a
    nonzero constant, otherwise a witnessed quotient field.
    """
    report = is_contact(alpha, grid_n)
    if report.verdict is not ContactVerdict.CONTACT:
        raise DegenerateFormError("cannot extract a Reeb field from a degenerate form")
    eta = ext_d(alpha)
    b01, b02, b12 = eta.components
    rho = report.density
    comps = (sdiv(b12, rho), sdiv(sneg(b02), rho), sdiv(b01, rho))
    for c in comps:
        if isinstance(c, ExprField) and c.op == "div":
            w = c.witness
            if not w.ok:
                raise WitnessError(
                    "nonconstant contact density lacks a nonvanishing witness")
    out = VectorField(comps)
    check = verify_reeb(alpha, out, strict=True, grid_n=grid_n, tol=1e-8)
    if not check.ok:
        raise DegenerateFormError(
            f"extracted field fails the defining identities "
            f"(residuals {check.d_alpha_residual:.2e}, {check.pairing_residual:.2e})")
    return out


def contact_from_beltrami(x: VectorField, g: Metric, mu: VolumeForm,
                          grid_n: int = grid.DEFAULT_N) -> ContactReport:
    """flat(X, g) is a contact form whenever X is a rotational curl
    eigenfield; the report carries the relaxed Reeb-likeness check for X."""
    rep = beltrami_factor(x, g, mu, grid_n)
    if rep.status is not BeltramiStatus.ROTATIONAL:
        raise NotRotationalError(
            f"field is not rotational (status {rep.status.value})")
    alpha = flat(x, g)
    contact = is_contact(alpha, grid_n)
    if contact.verdict is not ContactVerdict.CONTACT:
        raise NotRotationalError("induced 1-form fails the contact certificate")
    reeb_like = verify_reeb(alpha, x, strict=False, grid_n=grid_n)
    contact.reeb_like = reeb_like
    return contact


# -- adapted metric (converse construction) -----------------------------------------


@dataclass
class AdaptedFrame:
    e1: VectorField
    e2: VectorField
    e3: VectorField
    coframe: tuple                  # three 1-forms dual to (e1, e2, e3)
    residuals: dict

    def to_json_dict(self) -> dict:
        return {"residuals": dict(self.residuals)}


@dataclass
class AdaptedMetricResult:
    metric: Metric
    volume: VolumeForm
    frame: AdaptedFrame
    beltrami_residual: float
    volume_residual: float
    scaled_field: VectorField

    def __iter__(self):
        # unpacks as the (metric, volume, frame) triple
        return iter((self.metric, self.volume, self.frame))

    def to_json_dict(self) -> dict:
        return {
            "check": "adapted-metric",
            "beltrami_residual": self.beltrami_residual,
            "volume_residual": self.volume_residual,
            "frame_residuals": dict(self.frame.residuals),
        }


def _two_form_pairing(eta: KForm, v: VectorField, w: VectorField):
    """eta(v, w) for a 2-form eta."""
    acc = TrigPoly.zero()
    for (i, j), c in zip(((0, 1), (0, 2), (1, 2)), eta.components):
        term = ssub(smul(v.components[i], w.components[j]),
                    smul(v.components[j], w.components[i]))
        acc = sadd(acc, smul(c, term))
    return acc


def adapted_metric(alpha: KForm, x: VectorField, h,
                   grid_n: int = grid.DEFAULT_N,
                   tol: float = 1e-9) -> AdaptedMetricResult:
    """Build a metric and volume adapted to a strict Reeb pair (alpha, X) so
    the rescaled field hX is an exact curl eigenfield of eigenvalue one.

    Frame: e1 = X; e2 is the kernel projection v - alpha(v) X of the
    coordinate field whose projection is least degenerate on the grid
    (kept unnormalized so exact data stays exact); e3 spans the kernel
    direction Euclidean-orthogonal to e2, scaled so d(alpha)(e2, e3) = 1.
    Metric: h^{-1} c1 (x) c1 + c2 (x) c2 + c3 (x) c3 in the dual coframe;
    volume: h^{-1} c1 ^ c2 ^ c3.
    """
    strict = verify_reeb(alpha, x, strict=True, grid_n=grid_n, tol=1e-8)
    if not strict.ok:
        raise DegenerateFormError("adapted metric needs a strict Reeb pair")
    h = as_scalar(h)
    if isinstance(h, TrigPoly) and h.lower_bound() > 0:
        pass
    else:
        hmin = float(np.min(s_eval(h, grid.points(grid_n))))
        if hmin <= SINGULAR_TOL:
            raise WitnessError("scaling function lacks a positivity witness")

    pts = grid.points(grid_n)

    def project(v: VectorField) -> VectorField:
        pairing = interior(v, alpha).components[0]
        return VectorField(tuple(
            ssub(v.components[i], smul(pairing, x.components[i]))
            for i in range(3)))

    candidates = []
    for axis in range(3):
        proj = project(coordinate_field(axis))
        nsq = proj.norm_sq(euclidean_metric())
        score = float(np.min(s_eval(nsq, pts)))
        candidates.append((score, axis, proj))
    score, axis, e2 = max(candidates, key=lambda t: (t[0], -t[1]))
    if score <= SINGULAR_TOL:
        raise DegenerateFormError(
            "all three coordinate fields project degenerately onto ker(alpha)")

    normal = VectorField(alpha.components)  # Euclidean normal of the kernel
    w_leg = cross_euclidean(normal, e2)
    eta = ext_d(alpha)
    pairing = _two_form_pairing(eta, e2, w_leg)
    e3 = VectorField(tuple(sdiv(c, pairing) for c in w_leg.components))

    # coframe = inverse of the frame matrix (columns e1, e2, e3)
    cols = (x, e2, e3)
    m = [[cols[j].components[i] for j in range(3)] for i in range(3)]

    def det3(a):
        return sadd(
            ssub(smul(a[0][0], ssub(smul(a[1][1], a[2][2]),
                                                smul(a[1][2], a[2][1]))),
                       smul(a[0][1], ssub(smul(a[1][0], a[2][2]),
                                                smul(a[1][2], a[2][0])))),
            smul(a[0][2], ssub(smul(a[1][0], a[2][1]),
                                     smul(a[1][1], a[2][0]))))

    det = det3(m)

    def cof(i, j):
        rows = [k for k in range(3) if k != i]
        colsi = [k for k in range(3) if k != j]
        v = ssub(smul(m[rows[0]][colsi[0]], m[rows[1]][colsi[1]]),
                       smul(m[rows[0]][colsi[1]], m[rows[1]][colsi[0]]))
        return v if (i + j) % 2 == 0 else sneg(v)

    coframe = tuple(
        KForm(1, tuple(sdiv(cof(j, i), det) for j in range(3)))
        for i in range(3))

    hinv = sdiv(1, h)
    entries = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(i, 3):
            acc = smul(hinv, smul(coframe[0].components[i], coframe[0].components[j]))
            acc = sadd(acc, smul(coframe[1].components[i], coframe[1].components[j]))
            acc = sadd(acc, smul(coframe[2].components[i], coframe[2].components[j]))
            entries[i][j] = acc
            entries[j][i] = acc
    metric = Metric(tuple(tuple(r) for r in entries))

    # c1 ^ c2 ^ c3 = det(coframe rows) dx^dy^dz = (1/det frame) dx^dy^dz
    volume = VolumeForm(smul(hinv, sdiv(1, det)))

    scaled = VectorField(tuple(smul(h, c) for c in x.components))
    curl_scaled = curl(scaled, metric, volume)
    delta = curl_scaled - scaled
    beltrami_res = max(s_residual_max(c, grid_n) for c in delta.components)
    vol_rep = is_volume_preserving(scaled, volume, grid_n)

    residuals = {
        "alpha_e2": s_residual_max(interior(e2, alpha).components[0], grid_n),
        "alpha_e3": s_residual_max(interior(e3, alpha).components[0], grid_n),
        "pairing": s_residual_max(
            sadd(_two_form_pairing(eta, e2, e3), TrigPoly.constant(-1)), grid_n),
        "coframe_vs_alpha": max(
            s_residual_max(ssub(coframe[0].components[i], alpha.components[i]),
                           grid_n) for i in range(3)),
        "projection_score": score,
        "coordinate_axis": axis,
    }
    frame = AdaptedFrame(x, e2, e3, coframe, residuals)
    return AdaptedMetricResult(metric, volume, frame, beltrami_res,
                               vol_rep.residual, scaled)


# -- steady Euler -------------------------------------------------------------------


@dataclass
class EulerReport:
    verdict: EulerVerdict
    pressure: object | None
    beta: KForm
    volume_residual: float
    closedness_residual: float
    exactness_obstruction: tuple       # the three zero-mode coefficients of beta
    bernoulli_residual: float
    volume_report: VolumeReport = field(repr=False, default=None)

    def positive(self) -> bool:
        return self.verdict is EulerVerdict.STEADY_EULER

    def to_json_dict(self) -> dict:
        return {
            "check": "euler",
            "verdict": self.verdict.value,
            "pressure": None if self.pressure is None
            else _serialize_scalar(self.pressure),
            "volume_residual": self.volume_residual,
            "closedness_residual": self.closedness_residual,
            "exactness_obstruction": [_num(p) for p in self.exactness_obstruction],
            "bernoulli_residual": self.bernoulli_residual,
        }


def _antidifferentiate(beta: KForm) -> TrigPoly:
    """Exact potential of a closed trig-polynomial 1-form with zero periods,
    mode by mode; the integration constant is fixed to mean zero."""
    from .trig import COS, SIN, ZERO_MODE

    comps = beta.components
    terms: dict = {}
    seen = set()
    for i, c in enumerate(comps):
        for (k, parity), coeff in c.terms.items():
            if k == ZERO_MODE or k in seen:
                continue
            axis = next(a for a in range(3) if k[a] != 0)
            src = comps[axis]
            a_cos = src.coefficient(k, COS)
            b_sin = src.coefficient(k, SIN)
            ki = k[axis]
            # d/dx_i sends  c cos -> -c k_i sin  and  s sin -> s k_i cos
            s_coeff = a_cos / ki
            c_coeff = -b_sin / ki
            if s_coeff != 0:
                terms[(k, SIN)] = s_coeff
            if c_coeff != 0:
                terms[(k, COS)] = c_coeff
            seen.add(k)
    p = TrigPoly(terms)
    for axis in range(3):
        if not (p.diff(axis) - comps[axis]).is_zero():
            raise ValueError("1-form is not exact; no trig-polynomial potential")
    return p


def is_euler_steady(x: VectorField, g: Metric, mu: VolumeForm,
                    grid_n: int = grid.DEFAULT_N,
                    tol: float = 1e-10) -> EulerReport:
    """Steady-state check for the perfect incompressible fluid equations:
    the flow preserves mu and the transport term is a gradient."""
    from .exprfield import s_mean

    vol_rep = is_volume_preserving(x, mu, grid_n)
    w = curl(x, g, mu)
    vol_g = g.volume_form()
    beta = interior(x, interior(w, vol_g.as_kform())).scale(-1)
    dbeta = ext_d(beta)
    closed_res = dbeta.residual_max(grid_n)
    periods = tuple(s_mean(c) for c in beta.components)
    periods_ok = all(
        (p == 0) if isinstance(p, Fraction) else abs(p) <= tol for p in periods)

    steady = vol_rep.preserving and closed_res <= tol and periods_ok
    verdict = EulerVerdict.STEADY_EULER if steady else EulerVerdict.NOT_EULER

    pressure = None
    bernoulli = 0.0
    if steady:
        if all(isinstance(c, TrigPoly) for c in beta.components):
            pressure = _antidifferentiate(beta)
            transport = TrigPoly.zero()
            for axis in range(3):
                transport = sadd(transport,
                                 smul(x.components[axis], pressure.diff(axis)))
            bernoulli = s_residual_max(transport, grid_n)
        else:
            bernoulli = interior(x, beta).residual_max(grid_n)
    return EulerReport(verdict, pressure, beta, vol_rep.residual, closed_res,
                       periods, bernoulli, vol_rep)


# -- curl-free case -----------------------------------------------------------------


@dataclass
class CurlFreeReport:
    closed: bool
    closedness_residual: float
    nonvanishing: bool
    nonvanishing_certified: bool
    min_norm_sq: float
    foliation_flag: bool

    def positive(self) -> bool:
        return self.foliation_flag

    def to_json_dict(self) -> dict:
        return {
            "check": "curlfree",
            "closed": self.closed,
            "closedness_residual": self.closedness_residual,
            "nonvanishing": self.nonvanishing,
            "nonvanishing_certified": self.nonvanishing_certified,
            "min_norm_sq": self.min_norm_sq,
            "defines_codimension_one_foliation": self.foliation_flag,
        }


def curl_free_case(x: VectorField, g: Metric,
                   grid_n: int = grid.DEFAULT_N) -> CurlFreeReport:
    """For a curl-free field the 1-form flat(X, g) is closed; when it also
    has a certified nonvanishing norm its kernel integrates to a smooth
    codimension-one foliation (flagged only, not computed)."""
    alpha = flat(x, g)
    dalpha = ext_d(alpha)
    closed_exact = dalpha.is_zero()
    closed_res = 0.0 if closed_exact else dalpha.residual_max(grid_n)
    if not (closed_exact or closed_res <= 1e-10):
        raise WrongStatusError("field is not curl-free: flat(X, g) is not closed")

    nsq = x.norm_sq(g)
    certified = False
    if isinstance(nsq, TrigPoly) and nsq.lower_bound() > 0:
        min_nsq = float(nsq.lower_bound())
        certified = True
    else:
        vals = s_eval(nsq, grid.points(grid_n))
        min_nsq = float(np.min(vals))
        from .exprfield import s_grad_bound
        margin = 2.0 * s_grad_bound(nsq) * grid.half_cell_diagonal(grid_n)
        certified = min_nsq > margin
    nonvanishing = min_nsq > SINGULAR_TOL
    flag = (closed_res == 0.0 or closed_res <= 1e-10) and certified
    return CurlFreeReport(True, closed_res, nonvanishing, certified,
                          min_nsq, flag)
