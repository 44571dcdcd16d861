"""Trajectory integration on the universal cover, coordinate-plane sections
and Newton-refined periodic orbits.

Flows are integrated in the cover R^3 (the field is 2*pi-periodic, so no
wrapping is needed) with an adaptive Dormand-Prince 5(4) pair and quartic
dense output.  Winding vectors then come for free: a closed orbit's net
cover displacement divided by 2*pi is its integer homotopy data, and the
orbit is contractible exactly when that vector vanishes.

Tolerance ladder (defaults): integrator local error 1e-10, crossing-time
root polish 1e-10, Newton residual on the return map 1e-8, orbit
acceptance 1e-6.  Each stage is an order looser than the noise of the one
feeding it.  Absence of orbits is never evidence: searches report what
they found, and empty results are inconclusive by design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .forms import VectorField

TWO_PI = 2.0 * math.pi

# Dormand-Prince 5(4): FSAL, 7 stages, propagates the 5th-order solution.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# difference between the 5th- and 4th-order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# quartic dense-output polynomial, y(t0 + s h) = y0 + h K^T P [s, s^2, s^3, s^4]
_P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)


class StepSizeUnderflow(RuntimeError):
    def __init__(self, t: float, point):
        super().__init__(f"step size underflow at t = {t:.6g}, x = {point}")
        self.t = t
        self.point = point


@dataclass
class IntegratorStats:
    steps: int = 0
    rejected: int = 0
    nfev: int = 0
    max_local_error: float = 0.0


@dataclass
class Trajectory:
    """Adaptive-step solution in the cover, with dense output per step."""

    times: np.ndarray
    points: np.ndarray
    field: VectorField
    stats: IntegratorStats
    _seg_t0: np.ndarray = dc_field(repr=False, default=None)
    _seg_h: np.ndarray = dc_field(repr=False, default=None)
    _seg_y0: np.ndarray = dc_field(repr=False, default=None)
    _seg_k: np.ndarray = dc_field(repr=False, default=None)

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def end_point(self) -> np.ndarray:
        return self.points[-1]

    def eval(self, t: float) -> np.ndarray:
        """Dense-output value at time t (must lie inside the solved span)."""
        if t <= self.times[0]:
            return self.points[0].copy()
        if t >= self.times[-1]:
            return self.points[-1].copy()
        i = int(np.searchsorted(self._seg_t0, t, side="right")) - 1
        i = max(0, min(i, len(self._seg_t0) - 1))
        h = self._seg_h[i]
        s = (t - self._seg_t0[i]) / h
        powers = np.array([s, s * s, s ** 3, s ** 4])
        return self._seg_y0[i] + h * (self._seg_k[i].T @ (np.asarray(_P) @ powers))


def _initial_step(f, y0, tol):
    d0 = math.sqrt(sum(v * v for v in y0)) or 1.0
    f0 = f(*y0)
    d1 = math.sqrt(sum(v * v for v in f0)) or 1e-6
    return min(0.1, 0.01 * d0 / d1, (tol / d1) ** 0.2)


def integrate(x: VectorField, x0: Sequence[float], t_end: float,
              tol: float = 1e-10, max_step: float = math.inf) -> Trajectory:
    """Flow x0 forward for time t_end in the cover.

    Adaptive Dormand-Prince 5(4) with a PI-free standard controller; local
    error per step is held near tol (used for both the relative and
    absolute weights).  Deterministic for fixed inputs.
    """
    if t_end < 0:
        raise ValueError("t_end must be nonnegative; integrate -X instead")
    f = x.compiled()
    y = tuple(float(v) for v in x0)
    t = 0.0
    stats = IntegratorStats()
    times = [0.0]
    points = [y]
    seg_t0, seg_h, seg_y0, seg_k = [], [], [], []

    k1 = f(*y)
    stats.nfev += 1
    h = min(_initial_step(f, y, tol), t_end if t_end > 0 else 0.1, max_step)
    if t_end == 0.0:
        tr_pts = np.asarray(points)
        return Trajectory(np.asarray(times), tr_pts, x, stats,
                          np.zeros(0), np.zeros(0), np.zeros((0, 3)),
                          np.zeros((0, 7, 3)))

    while t < t_end:
        h = min(h, t_end - t, max_step)
        if h < 1e-14 * max(1.0, abs(t)):
            raise StepSizeUnderflow(t, y)
        k = [k1, None, None, None, None, None, None]
        for s in range(1, 7):
            acc = [0.0, 0.0, 0.0]
            row = _A[s]
            for j, a in enumerate(row):
                if a == 0.0:
                    continue
                kj = k[j]
                acc[0] += a * kj[0]
                acc[1] += a * kj[1]
                acc[2] += a * kj[2]
            ys = (y[0] + h * acc[0], y[1] + h * acc[1], y[2] + h * acc[2])
            k[s] = f(*ys)
        stats.nfev += 6
        # 6th stage argument already is the 5th-order solution (FSAL)
        y_new = ys
        err = [0.0, 0.0, 0.0]
        for j in range(7):
            e = _E[j]
            if e == 0.0:
                continue
            kj = k[j]
            err[0] += e * kj[0]
            err[1] += e * kj[1]
            err[2] += e * kj[2]
        err_norm = 0.0
        for i in range(3):
            sc = tol + tol * max(abs(y[i]), abs(y_new[i]))
            err_norm += (h * err[i] / sc) ** 2
        err_norm = math.sqrt(err_norm / 3.0)

        if err_norm <= 1.0:
            seg_t0.append(t)
            seg_h.append(h)
            seg_y0.append(y)
            seg_k.append(k)
            t += h
            y = y_new
            k1 = k[6]
            times.append(t)
            points.append(y)
            stats.steps += 1
            stats.max_local_error = max(stats.max_local_error,
                                        h * max(abs(e) for e in err))
            factor = 5.0 if err_norm == 0.0 else min(5.0, 0.9 * err_norm ** -0.2)
        else:
            stats.rejected += 1
            factor = max(0.2, 0.9 * err_norm ** -0.2)
        h *= factor

    return Trajectory(np.asarray(times), np.asarray(points), x, stats,
                      np.asarray(seg_t0), np.asarray(seg_h),
                      np.asarray(seg_y0), np.asarray(seg_k))


# -- plane crossings -------------------------------------------------------------------


@dataclass(frozen=True)
class Crossing:
    time: float
    point: tuple          # cover coordinates
    direction: int        # sign of the axis velocity at the crossing


@dataclass
class SeedRecord:
    seed_index: int
    seed: tuple
    crossings: list
    grazes: int
    exhausted: bool       # True when the time budget ran out short of the goal


@dataclass
class SectionData:
    axis: int
    value: float
    records: list
    tol: float
    t_max: float
    crossings_requested: int

    @property
    def total_crossings(self) -> int:
        return sum(len(r.crossings) for r in self.records)

    def points_uv(self) -> np.ndarray:
        """Section coordinates (the two non-plane axes, mod 2*pi)."""
        u_axis, v_axis = [a for a in range(3) if a != self.axis]
        rows = [(c.point[u_axis] % TWO_PI, c.point[v_axis] % TWO_PI)
                for r in self.records for c in r.crossings]
        return np.asarray(rows) if rows else np.zeros((0, 2))


def plane_crossings(traj: Trajectory, axis: int, value: float,
                    root_tol: float = 1e-10, graze_tol: float = 1e-8,
                    max_count: int | None = None):
    """Transversal crossings of the lifted planes  coordinate = value mod 2*pi.

    Sign-change bracketing over accepted steps, then Brent root polish on
    the dense output; grazes (axis velocity below graze_tol) are skipped
    and counted.  A start point sitting exactly on the plane is not a
    crossing, and a landing exactly on the plane is owned by the step that
    ends there only when no further step exists (so chunked integration
    counts it exactly once).
    """
    f = traj.field.compiled()
    crossings = []
    grazes = 0
    times, pts = traj.times, traj.points
    last = len(times) - 2

    def u_of(t):
        return traj.eval(t)[axis] - value

    for i in range(len(times) - 1):
        ta, tb = float(times[i]), float(times[i + 1])
        ua = pts[i][axis] - value
        ub = pts[i + 1][axis] - value
        lo, hi = (ua, ub) if ua <= ub else (ub, ua)
        m_first = math.ceil(lo / TWO_PI - 1e-12)
        m_last = math.floor(hi / TWO_PI + 1e-12)
        for m in range(m_first, m_last + 1):
            target = m * TWO_PI
            ga, gb = ua - target, ub - target
            if ga == 0.0 and i == 0:
                continue  # trajectory starts on the plane; not a crossing
            if ga * gb > 0:
                continue
            if gb == 0.0 and i != last:
                continue  # the next step's left endpoint owns this landing
            if ga == 0.0:
                t_root = ta
            elif gb == 0.0:
                t_root = tb
            else:
                t_root = brentq(lambda t: u_of(t) - target, ta, tb,
                                xtol=root_tol * 0.01, rtol=8.9e-16)
            p = traj.eval(t_root)
            vel = f(*p)[axis]
            if abs(vel) < graze_tol:
                grazes += 1
                continue
            crossings.append(Crossing(float(t_root), tuple(p),
                                      1 if vel > 0 else -1))
            if max_count is not None and len(crossings) >= max_count:
                return crossings, grazes
    return crossings, grazes


def poincare(x: VectorField, axis: int, value: float, seeds,
             crossings: int = 6, tol: float = 1e-10,
             t_max: float = 200.0, graze_tol: float = 1e-8,
             jobs: int = 1) -> SectionData:
    """Record the requested number of transversal crossings per seed.

    Integration runs in fixed-length chunks until enough crossings arrive
    or the budget t_max runs out (flagged per seed).  Seed jobs are
    independent; results are merged in seed order, so the output does not
    depend on the worker count.
    """
    seeds = [tuple(float(v) for v in s) for s in seeds]

    def run(idx_seed):
        idx, seed = idx_seed
        found = []
        grazes = 0
        chunk = max(20.0, TWO_PI * 2)
        start = seed
        t_used = 0.0
        exhausted = True
        while t_used < t_max:
            span = min(chunk, t_max - t_used)
            traj = integrate(x, start, span, tol)
            got, g = plane_crossings(traj, axis, value, graze_tol=graze_tol,
                                     max_count=crossings - len(found))
            for c in got:
                found.append(Crossing(c.time + t_used, c.point, c.direction))
            grazes += g
            t_used += span
            start = tuple(traj.end_point)
            if len(found) >= crossings:
                exhausted = False
                break
        return SeedRecord(idx, seed, found, grazes, exhausted)

    items = list(enumerate(seeds))
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(run, items))
    else:
        records = [run(it) for it in items]
    return SectionData(axis, float(value), records, tol, t_max, crossings)


# -- periodic orbits ------------------------------------------------------------------


@dataclass(frozen=True)
class Orbit:
    base: tuple                 # representative point, reduced mod 2*pi
    period: float
    winding: tuple              # integer cover displacement / 2*pi
    residual: float             # cover gap after one period, deck-corrected
    multipliers: tuple | None   # return-map eigenvalues, deterministic order
    seed_index: int
    crossings_per_period: int

    @property
    def contractible(self) -> bool:
        return self.winding == (0, 0, 0)

    def to_json_dict(self) -> dict:
        out = {
            "base": list(self.base),
            "period": self.period,
            "winding": list(self.winding),
            "residual": self.residual,
            "contractible": self.contractible,
            "seed_index": self.seed_index,
            "crossings_per_period": self.crossings_per_period,
        }
        if self.multipliers is not None:
            out["multipliers"] = [[m.real, m.imag] for m in self.multipliers]
        return out


def contractible(orbit: Orbit) -> bool:
    """Zero winding on the cover means the closed orbit is null-homotopic."""
    return orbit.winding == (0, 0, 0)


@dataclass
class OrbitSearchResult:
    orbits: list
    dropped: list          # diagnostics for candidates Newton could not close
    section: SectionData

    def __iter__(self):
        return iter(self.orbits)

    def __len__(self):
        return len(self.orbits)

    def __getitem__(self, i):
        return self.orbits[i]


def _wrap_pi(d: np.ndarray) -> np.ndarray:
    return d - TWO_PI * np.round(d / TWO_PI)


def find_orbits(x: VectorField, section: SectionData,
                newton_tol: float = 1e-8, max_iter: int = 25,
                orbit_tol: float = 1e-6, recurrence_tol: float = 0.35,
                max_candidates_per_seed: int = 4,
                t_budget: float | None = None) -> OrbitSearchResult:
    """Cluster near-recurrent section crossings, polish each candidate with
    Newton on the 2D return map (finite-difference Jacobian), deduplicate
    up to time shift and deck transformation, and attach winding data."""
    axis, value = section.axis, section.value
    u_axis, v_axis = [a for a in range(3) if a != axis]
    tol = section.tol
    t_budget = t_budget if t_budget is not None else section.t_max

    def embed(q):
        p = [0.0, 0.0, 0.0]
        p[axis] = value
        p[u_axis], p[v_axis] = float(q[0]), float(q[1])
        return tuple(p)

    def return_map(q, sign, kappa, budget):
        """kappa-th same-direction crossing from a point on the section."""
        start = embed(q)
        t_used = 0.0
        counted = 0
        chunk = max(10.0, TWO_PI)
        pos = start
        while t_used < budget:
            span = min(chunk, budget - t_used)
            traj = integrate(x, pos, span, tol)
            got, _ = plane_crossings(traj, axis, value)
            for c in got:
                if c.direction != sign:
                    continue
                counted += 1
                if counted == kappa:
                    disp = np.asarray(c.point) - np.asarray(start)
                    return (np.array([c.point[u_axis], c.point[v_axis]]),
                            c.time + t_used, disp)
            t_used += span
            pos = tuple(traj.end_point)
        return None

    # candidate generation: same-direction near-recurrences, small kappa first
    candidates = []
    for rec in section.records:
        per_seed = []
        for sgn in (1, -1):
            idxs = [i for i, c in enumerate(rec.crossings) if c.direction == sgn]
            for a_pos in range(len(idxs)):
                for b_pos in range(a_pos + 1, len(idxs)):
                    i, j = idxs[a_pos], idxs[b_pos]
                    ci, cj = rec.crossings[i], rec.crossings[j]
                    d = _wrap_pi(np.array([
                        cj.point[u_axis] - ci.point[u_axis],
                        cj.point[v_axis] - ci.point[v_axis]]))
                    dist = float(np.hypot(*d))
                    if dist < recurrence_tol:
                        kappa = b_pos - a_pos
                        q0 = np.array([ci.point[u_axis] % TWO_PI,
                                       ci.point[v_axis] % TWO_PI])
                        ret_time = cj.time - ci.time
                        per_seed.append((kappa, dist, rec.seed_index, sgn, q0,
                                         ret_time))
        per_seed.sort(key=lambda c: (c[0], c[1]))
        seen_cells = set()
        kept = 0
        for cand in per_seed:
            cell = (cand[0], cand[3], round(cand[4][0], 1), round(cand[4][1], 1))
            if cell in seen_cells:
                continue
            seen_cells.add(cell)
            candidates.append(cand)
            kept += 1
            if kept >= max_candidates_per_seed:
                break

    orbits = []
    dropped = []
    fd_h = 1e-6

    def fd_jacobian(q, sign, kappa, budget, seed_index):
        jac = np.zeros((2, 2))
        for col in range(2):
            qp, qm = q.copy(), q.copy()
            qp[col] += fd_h
            qm[col] -= fd_h
            hp = return_map(qp, sign, kappa, budget)
            hm = return_map(qm, sign, kappa, budget)
            if hp is None or hm is None:
                dropped.append(f"seed {seed_index}: Jacobian probe left section")
                return None
            jac[:, col] = _wrap_pi(hp[0] - hm[0]) / (2 * fd_h)
        return jac

    for kappa, _dist, seed_index, sign, q0, ret_time in candidates:
        budget = min(t_budget, max(2.5 * ret_time, ret_time + 12.0))
        q = q0.copy()
        jac = None
        converged = False
        prev_res = math.inf
        for _it in range(max_iter):
            hit = return_map(q, sign, kappa, budget)
            if hit is None:
                dropped.append(f"seed {seed_index}: no return within budget")
                break
            pq, _T, _disp = hit
            fval = _wrap_pi(pq - q)
            res = float(np.max(np.abs(fval)))
            if res < newton_tol:
                converged = True
                break
            # refresh the Jacobian only when progress stalls
            if jac is None or res > 0.5 * prev_res:
                jac = fd_jacobian(q, sign, kappa, budget, seed_index)
                if jac is None:
                    break
            prev_res = res
            m = jac - np.eye(2)
            try:
                step = np.linalg.solve(m, -fval)
            except np.linalg.LinAlgError:
                step, *_ = np.linalg.lstsq(m, -fval, rcond=None)
            norm = float(np.hypot(*step))
            if norm > 0.5:
                step *= 0.5 / norm
            if not np.all(np.isfinite(step)):
                dropped.append(f"seed {seed_index}: Newton step became non-finite")
                break
            q = q + step
        else:
            dropped.append(f"seed {seed_index}: Newton did not converge "
                           f"in {max_iter} iterations")
        if not converged:
            continue

        # polish: near-unit multipliers leave the fixed point an order or two
        # looser than the residual, which would defeat deduplication
        for _polish in range(4):
            hit = return_map(q, sign, kappa, budget)
            if hit is None:
                break
            fval = _wrap_pi(hit[0] - q)
            res = float(np.max(np.abs(fval)))
            if res < 1e-12:
                break
            jac2 = fd_jacobian(q, sign, kappa, budget, seed_index)
            if jac2 is None:
                break
            jac = jac2
            m = jac - np.eye(2)
            try:
                step = np.linalg.solve(m, -fval)
            except np.linalg.LinAlgError:
                step, *_ = np.linalg.lstsq(m, -fval, rcond=None)
            if not np.all(np.isfinite(step)) or float(np.hypot(*step)) > 0.1:
                break
            q = q + step

        hit = return_map(q, sign, kappa, budget)
        if hit is None:
            dropped.append(f"seed {seed_index}: lost the refined orbit")
            continue
        _pq, period, disp = hit
        winding = tuple(int(w) for w in np.round(disp / TWO_PI))
        residual = float(np.linalg.norm(disp - TWO_PI * np.asarray(winding)))
        if residual > orbit_tol:
            dropped.append(f"seed {seed_index}: residual {residual:.2e} "
                           f"exceeds {orbit_tol:g}")
            continue
        if jac is not None:
            eig = sorted(np.linalg.eigvals(jac),
                         key=lambda z: (round(z.real, 12), round(z.imag, 12)))
            multipliers = tuple(complex(z) for z in eig)
        else:
            multipliers = None
        base = tuple(float(v % TWO_PI) for v in embed(q))
        orbits.append(Orbit(base, float(period), winding, residual,
                            multipliers, seed_index, kappa))

    orbits = _deduplicate(x, orbits, tol, orbit_tol)
    orbits.sort(key=lambda o: (o.base, o.period))
    return OrbitSearchResult(orbits, dropped, section)


def _deduplicate(x: VectorField, orbits: list, tol: float,
                 orbit_tol: float) -> list:
    """Drop orbits that lie on an already-kept orbit (base point within
    orbit_tol after an optimal time shift, winding and period matching an
    integer number of traversals).  Sorting by period first keeps the prime
    orbit and discards its multiple covers."""
    kept: list[Orbit] = []
    curves: list[tuple] = []
    for orb in sorted(orbits, key=lambda o: (o.period, o.base)):
        duplicate = False
        for other, curve in zip(kept, curves):
            m = round(orb.period / other.period) if other.period > 0 else 0
            if m < 1:
                continue
            if abs(orb.period - m * other.period) > 1e-5 * max(1.0, orb.period):
                continue
            if orb.winding != tuple(m * w for w in other.winding):
                continue
            ts, tr, traj = curve
            target = np.asarray(orb.base)
            gaps = _wrap_pi(tr - target)
            dmin_idx = int(np.argmin(np.linalg.norm(gaps, axis=1)))
            coarse = float(np.linalg.norm(gaps[dmin_idx]))
            if coarse < 1e-3:
                lo = max(0.0, ts[dmin_idx] - (ts[1] - ts[0]))
                hi = min(other.period, ts[dmin_idx] + (ts[1] - ts[0]))
                from scipy.optimize import minimize_scalar
                res = minimize_scalar(
                    lambda t: float(np.linalg.norm(
                        _wrap_pi(traj.eval(t) - target))),
                    bounds=(lo, hi), method="bounded",
                    options={"xatol": 1e-10})
                if float(res.fun) < orbit_tol:
                    duplicate = True
                    break
        if not duplicate:
            traj = integrate(x, orb.base, orb.period, tol)
            ts = np.linspace(0.0, orb.period, 512)
            tr = np.asarray([traj.eval(t) for t in ts])
            kept.append(orb)
            curves.append((ts, tr, traj))
    return kept


# -- sweeps and tabular output ---------------------------------------------------------


def lattice_seeds(axis: int, value: float, n: int):
    """n x n vertex lattice on the plane, spacing 2*pi/n, starting at 0."""
    u_axis, v_axis = [a for a in range(3) if a != axis]
    seeds = []
    for i in range(n):
        for j in range(n):
            p = [0.0, 0.0, 0.0]
            p[axis] = value
            p[u_axis] = TWO_PI * i / n
            p[v_axis] = TWO_PI * j / n
            seeds.append(tuple(p))
    return seeds


def orbit_sweep(x: VectorField, planes=None, seeds_per_plane: int = 6,
                crossings: int = 5, tol: float = 1e-9, t_max: float = 120.0,
                newton_tol: float = 1e-8, orbit_tol: float = 1e-6,
                max_iter: int = 12, max_candidates_per_seed: int = 3,
                jobs: int = 1):
    """Run sections on the given (axis, value) planes (default: all three
    coordinate planes through 0) and merge the deduplicated orbit lists.

    The defaults are the documented desk-scale sweep: a 6x6 vertex lattice
    per coordinate plane, five recorded crossings per seed, and a capped
    Newton budget so chaotic candidates fail fast.
    """
    if planes is None:
        planes = [(0, 0.0), (1, 0.0), (2, 0.0)]
    all_orbits = []
    all_dropped = []
    sections = []
    for axis, value in planes:
        seeds = lattice_seeds(axis, value, seeds_per_plane)
        section = poincare(x, axis, value, seeds, crossings=crossings,
                           tol=tol, t_max=t_max, jobs=jobs)
        sections.append(section)
        result = find_orbits(x, section, newton_tol=newton_tol,
                             orbit_tol=orbit_tol, max_iter=max_iter,
                             max_candidates_per_seed=max_candidates_per_seed)
        all_orbits.extend(result.orbits)
        all_dropped.extend(result.dropped)
    merged = _deduplicate(x, all_orbits, tol, orbit_tol)
    merged.sort(key=lambda o: (o.base, o.period))
    return merged, all_dropped, sections


_CSV_FLOAT = "{:.12g}"


def section_csv_rows(section: SectionData):
    header = ["seed_index", "crossing_index", "time", "x", "y", "z",
              "u", "v", "direction"]
    u_axis, v_axis = [a for a in range(3) if a != section.axis]
    rows = [header]
    for rec in section.records:
        for idx, c in enumerate(rec.crossings):
            rows.append([
                str(rec.seed_index), str(idx), _CSV_FLOAT.format(c.time),
                _CSV_FLOAT.format(c.point[0]), _CSV_FLOAT.format(c.point[1]),
                _CSV_FLOAT.format(c.point[2]),
                _CSV_FLOAT.format(c.point[u_axis] % TWO_PI),
                _CSV_FLOAT.format(c.point[v_axis] % TWO_PI),
                str(c.direction)])
    return rows


def orbit_csv_rows(orbits):
    header = ["index", "base_x", "base_y", "base_z", "period",
              "winding_x", "winding_y", "winding_z", "residual",
              "contractible", "multiplier1_re", "multiplier1_im",
              "multiplier2_re", "multiplier2_im", "seed_index",
              "crossings_per_period"]
    rows = [header]
    for i, o in enumerate(orbits):
        mult = o.multipliers or (complex("nan"), complex("nan"))
        rows.append([
            str(i),
            _CSV_FLOAT.format(o.base[0]), _CSV_FLOAT.format(o.base[1]),
            _CSV_FLOAT.format(o.base[2]), _CSV_FLOAT.format(o.period),
            str(o.winding[0]), str(o.winding[1]), str(o.winding[2]),
            _CSV_FLOAT.format(o.residual), str(int(o.contractible)),
            _CSV_FLOAT.format(mult[0].real), _CSV_FLOAT.format(mult[0].imag),
            _CSV_FLOAT.format(mult[1].real), _CSV_FLOAT.format(mult[1].imag),
            str(o.seed_index), str(o.crossings_per_period)])
    return rows
