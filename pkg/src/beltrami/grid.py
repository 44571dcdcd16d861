"""Verification grids on the 3-torus.

All nonvanishing / positivity checks sample on a cell-centered uniform
lattice, points 2*pi*(i + 1/2)/n per axis.  Cell centers keep the sampled
set disjoint from the coordinate sublattices where model fields place their
stagnation points, and the midpoint rule they induce integrates trig
polynomials of mode < n exactly.  A grid check is a certificate, not a
proof; margin-based variants below account for the gap between samples.
"""

from __future__ import annotations

import functools
import math

import numpy as np

DEFAULT_N = 32

_TWO_PI = 2.0 * math.pi


@functools.lru_cache(maxsize=8)
def points(n: int = DEFAULT_N) -> np.ndarray:
    """Cell-centered lattice with n^3 points, shape (n^3, 3). Cached."""
    axis = _TWO_PI * (np.arange(n) + 0.5) / n
    xs, ys, zs = np.meshgrid(axis, axis, axis, indexing="ij")
    pts = np.stack([xs.ravel(), ys.ravel(), zs.ravel()], axis=-1)
    pts.setflags(write=False)
    return pts


def half_cell_diagonal(n: int) -> float:
    """Max distance from any torus point to the nearest lattice point."""
    return (_TWO_PI / n) * math.sqrt(3.0) / 2.0


def max_abs(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if values.size else 0.0


def min_abs(values: np.ndarray) -> float:
    return float(np.min(np.abs(values))) if values.size else 0.0
