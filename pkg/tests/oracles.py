"""Independent brute-force oracles used to verify the library's fast paths.

These deliberately take different computational routes than the library:
all-pairs halfplane tests for hull vertices, fan triangulation for areas,
indicator Monte Carlo for cap areas, and a dense direction scan with a
width-integral style clipped shoelace for the minimal cap function.
"""
from __future__ import annotations

import numpy as np

from hulllab.geometry import Polygon


def extreme_vertex_set(points: np.ndarray) -> set[tuple[float, float]]:
    """Hull vertex set by the O(n^3) all-pairs halfplane test.

    An ordered pair (i, j) spans a hull edge iff every other point lies
    strictly to its left; a point is a hull vertex iff it starts such an
    edge. Assumes points in general position (no exact ties), which holds
    almost surely for random real inputs.
    """
    pts = np.asarray(points, dtype=np.float64)
    n = len(pts)
    if n == 1:
        return {tuple(pts[0])}
    diff = pts[None, :, :] - pts[:, None, :]  # diff[i, j] = p_j - p_i
    cross = (
        diff[:, :, None, 0] * diff[:, None, :, 1]
        - diff[:, :, None, 1] * diff[:, None, :, 0]
    )  # cross[i, j, k] = (p_j - p_i) x (p_k - p_i)
    strict_left = cross > 0
    idx = np.arange(n)
    strict_left[:, idx, idx] = True  # k == j
    strict_left[idx, :, idx] = True  # k == i
    is_edge = strict_left.all(axis=2)
    is_edge[idx, idx] = False
    vertex = is_edge.any(axis=1)
    return {tuple(p) for p in pts[vertex]}


def fan_area(vertices: np.ndarray) -> float:
    """Polygon area as a sum of fan triangle areas from vertex 0."""
    v = np.asarray(vertices, dtype=np.float64)
    total = 0.0
    for i in range(1, len(v) - 1):
        a, b, c = v[0], v[i], v[i + 1]
        total += 0.5 * abs(
            (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        )
    return total


def mc_cap_area(
    polygon: Polygon, normal, offset: float, m: int, seed: int
) -> tuple[float, float]:
    """Monte Carlo estimate of area(P intersect {u.x <= t}) with stderr."""
    rng = np.random.default_rng(seed)
    lo = polygon.vertices.min(axis=0)
    hi = polygon.vertices.max(axis=0)
    pts = lo + rng.random((m, 2)) * (hi - lo)
    box = float(np.prod(hi - lo))
    inside = polygon.contains_many(pts)
    below = pts @ np.asarray(normal) <= offset
    frac = float((inside & below).mean())
    return box * frac, box * np.sqrt(max(frac * (1 - frac), 1e-300) / m)


def scan_cap_areas(polygon: Polygon, z, directions: int) -> np.ndarray:
    """Cap areas cut by lines through z for a dense direction grid.

    Vectorized across directions; per direction the clipped region's
    shoelace sum is assembled from edge-case masks plus the closing chord
    between the exit and entry crossing points.
    """
    v = polygon.vertices
    ell = len(v)
    z = np.asarray(z, dtype=np.float64)
    theta = 2.0 * np.pi * np.arange(directions) / directions
    u = np.column_stack([np.cos(theta), np.sin(theta)])
    t = u @ z
    side = u @ v.T - t[:, None]  # (D, ell), <= 0 means kept side
    below = side <= 0.0
    area2 = np.zeros(directions)
    exit_x = np.zeros(directions)
    exit_y = np.zeros(directions)
    entry_x = np.zeros(directions)
    entry_y = np.zeros(directions)
    crossing = np.zeros(directions, dtype=bool)
    for j in range(ell):
        jn = (j + 1) % ell
        a = v[j]
        b = v[jn]
        sa = side[:, j]
        sb = side[:, jn]
        in_a = below[:, j]
        in_b = below[:, jn]
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = sa / (sa - sb)
            ix = a[0] + frac * (b[0] - a[0])
            iy = a[1] + frac * (b[1] - a[1])
            cross_ab = a[0] * b[1] - a[1] * b[0]
            both = in_a & in_b
            leaving = in_a & ~in_b
            entering = ~in_a & in_b
            area2 += np.where(both, cross_ab, 0.0)
            area2 += np.where(leaving, a[0] * iy - a[1] * ix, 0.0)
            area2 += np.where(entering, ix * b[1] - iy * b[0], 0.0)
        exit_x = np.where(leaving, ix, exit_x)
        exit_y = np.where(leaving, iy, exit_y)
        entry_x = np.where(entering, ix, entry_x)
        entry_y = np.where(entering, iy, entry_y)
        crossing |= leaving
    area2 += np.where(crossing, exit_x * entry_y - exit_y * entry_x, 0.0)
    return 0.5 * area2


def scan_v(polygon: Polygon, z, directions: int = 100_000) -> float:
    """Brute-force minimal cap value: minimum over a dense direction grid."""
    return float(scan_cap_areas(polygon, z, directions).min())


def random_convex_polygon(rng: np.random.Generator, spread: int = 12) -> Polygon:
    """Random strictly convex polygon: hull of `spread` random points."""
    from hulllab.geometry import convex_hull, normalize_to_unit_area

    while True:
        hull = convex_hull(rng.random((spread, 2)))
        if isinstance(hull, Polygon) and len(hull) >= 4:
            return normalize_to_unit_area(hull)
