"""Figure rendering for section and orbit data.

Written next to the delimited output by the CLI report path; headless
(Agg) so runs never need a display.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

TWO_PI = 2.0 * math.pi

_AXIS_NAMES = "xyz"


def save_section_figure(section, path, title: str | None = None) -> None:
    """Scatter of section crossings in the two in-plane coordinates."""
    u_axis, v_axis = [a for a in range(3) if a != section.axis]
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    cmap = plt.get_cmap("viridis")
    nseeds = max(1, len(section.records))
    for rec in section.records:
        if not rec.crossings:
            continue
        pts = np.array([(c.point[u_axis] % TWO_PI, c.point[v_axis] % TWO_PI)
                        for c in rec.crossings])
        ax.plot(pts[:, 0], pts[:, 1], ".", ms=2.5,
                color=cmap(rec.seed_index / nseeds))
    ax.set_xlim(0, TWO_PI)
    ax.set_ylim(0, TWO_PI)
    ax.set_aspect("equal")
    ax.set_xlabel(_AXIS_NAMES[u_axis])
    ax.set_ylabel(_AXIS_NAMES[v_axis])
    plane = f"{_AXIS_NAMES[section.axis]} = {section.value:g}"
    ax.set_title(title or f"section {plane} "
                 f"({section.total_crossings} crossings)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_orbit_figure(orbits, field, path, tol: float = 1e-9,
                      title: str | None = None) -> None:
    """Coordinate-plane projections of each refined orbit over one period."""
    from .orbits import integrate

    fig, axes = plt.subplots(1, 3, figsize=(13.0, 4.4))
    pairs = ((0, 1), (0, 2), (1, 2))
    cmap = plt.get_cmap("tab20")
    for idx, orbit in enumerate(orbits):
        traj = integrate(field, orbit.base, orbit.period, tol)
        ts = np.linspace(0.0, orbit.period, 400)
        pts = np.array([traj.eval(t) for t in ts]) % TWO_PI
        color = cmap(idx % 20)
        for ax, (a, b) in zip(axes, pairs):
            # break the polyline at wrap-around jumps
            jump = np.any(np.abs(np.diff(pts[:, [a, b]], axis=0)) > math.pi,
                          axis=1)
            segments = np.split(np.arange(len(ts)), np.where(jump)[0] + 1)
            for seg in segments:
                if len(seg) > 1:
                    ax.plot(pts[seg, a], pts[seg, b], "-", lw=0.9, color=color)
    for ax, (a, b) in zip(axes, pairs):
        ax.set_xlim(0, TWO_PI)
        ax.set_ylim(0, TWO_PI)
        ax.set_aspect("equal")
        ax.set_xlabel(_AXIS_NAMES[a])
        ax.set_ylabel(_AXIS_NAMES[b])
    fig.suptitle(title or f"{len(orbits)} refined periodic orbits")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
