"""Cap areas, the minimal-cap function v, floating bodies and wet parts.

v(z) is the smallest area of a cap of the container cut off by a line
through z; the floating body with parameter delta is the convex level set
{v >= delta}, the wet part its complement.

Two evaluators are provided. `v_value` follows the contract route: a
720-direction scan of cap areas with golden-section refinement on every
local basin. `v_values` is the bulk evaluator: the minimal cap through z has
z as the midpoint of its chord, so enumerating chords with midpoint z over
all ordered edge pairs gives the exact minimum in closed form, vectorized
over many query points. The two routes cross-check each other in the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    HalfPlane,
    Polygon,
    clip_halfplane,
    shoelace_area,
    vertex_count,
    convex_hull,
)
from .sampling import PointSample, RandomStream, uniform_points

_SCAN_DIRECTIONS = 720
_GOLDEN_ITERATIONS = 90  # shrinks a scan bracket far below 1e-8 relative
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class EventParams:
    """Constants for the floating-body containment and point-count events.

    The source results only assert existence of workable constants; these
    defaults were calibrated by pilot runs and can be overridden.
    """

    b0: float = 1.0
    c0: float = 4.0

    def __post_init__(self):
        if self.b0 <= 0 or self.c0 <= 0:
            raise ValueError("event constants must be positive")


def cap_area(polygon: Polygon, halfplane: HalfPlane) -> float:
    """Area of the part of the polygon on the lower side {u . x <= t}."""
    clipped = clip_halfplane(polygon.vertices, halfplane.normal, halfplane.offset)
    if len(clipped) < 3:
        return 0.0
    return shoelace_area(clipped)


def _cap_at_angle(polygon: Polygon, z: np.ndarray, theta: float) -> float:
    return cap_area(polygon, HalfPlane.from_direction(theta, z))


def _golden_min(f, a: float, b: float) -> float:
    """Golden-section minimum of f on [a, b] (value, not argument)."""
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(_GOLDEN_ITERATIONS):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
    return min(f1, f2)


def v_value(polygon: Polygon, z) -> float:
    """Minimal cap area over all lines through z (scan plus refinement).

    Scans 720 directions and polishes every local basin with golden-section
    iterations, which resolves the minimum to far better than 1e-8 relative.
    Raises if z lies outside the polygon.
    """
    z = np.asarray(z, dtype=np.float64)
    depth = polygon.boundary_distance(z)
    if depth < -1e-12 * polygon.diameter:
        raise ValueError("query point lies outside the polygon")
    if depth <= 0.0:
        return 0.0
    thetas = np.linspace(0.0, 2.0 * math.pi, _SCAN_DIRECTIONS, endpoint=False)
    vals = np.array([_cap_at_angle(polygon, z, t) for t in thetas])
    best = float(vals.min())
    step = 2.0 * math.pi / _SCAN_DIRECTIONS
    is_min = (vals <= np.roll(vals, 1)) & (vals <= np.roll(vals, -1))
    for i in np.flatnonzero(is_min):
        refined = _golden_min(
            lambda t: _cap_at_angle(polygon, z, t),
            thetas[i] - step,
            thetas[i] + step,
        )
        best = min(best, refined)
    return best


def v_values(polygon: Polygon, points: np.ndarray) -> np.ndarray:
    """Exact v for many points inside the polygon, vectorized.

    Any minimizing cap has its query point as the midpoint of its chord, so
    for each ordered pair of container edges the unique chord with that
    midpoint is solved for and its cap area evaluated; the minimum over valid
    pairs is v. Chord families between parallel edges have constant cap area
    and are attained again at a vertex transition, which a nonparallel pair
    picks up, so parallel pairs are skipped.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    m = len(pts)
    if m == 0:
        return np.empty(0)
    v = polygon.vertices
    ell = len(v)
    nxt = np.roll(v, -1, axis=0)
    edge_vec = nxt - v
    # cross(v_k, v_{k+1}) partial sums for cap shoelace assembly
    cross_consec = v[:, 0] * nxt[:, 1] - v[:, 1] * nxt[:, 0]
    px = pts[:, 0]
    py = pts[:, 1]
    best = np.full(m, np.inf)
    scale = polygon.diameter
    for i in range(ell):
        ai = v[i]
        da = edge_vec[i]
        for j in range(ell):
            if j == i:
                continue
            bj = v[j]
            db = edge_vec[j]
            det = da[0] * db[1] - da[1] * db[0]
            if abs(det) < 1e-14 * scale * scale:
                continue
            rx = 2.0 * px - ai[0] - bj[0]
            ry = 2.0 * py - ai[1] - bj[1]
            s = (rx * db[1] - ry * db[0]) / det
            t = (da[0] * ry - da[1] * rx) / det
            valid = (s >= -1e-9) & (s <= 1.0 + 1e-9) & (t >= -1e-9) & (t <= 1.0 + 1e-9)
            if not valid.any():
                continue
            qx = bj[0] + t * db[0]
            qy = bj[1] + t * db[1]
            p0x = ai[0] + s * da[0]
            p0y = ai[1] + s * da[1]
            # cap polygon [p, v_{i+1}, ..., v_j, q]; interior chain constant
            if j > i:
                chain = cross_consec[i + 1 : j].sum()
            else:
                chain = cross_consec[i + 1 :].sum() + cross_consec[:j].sum()
            head = v[(i + 1) % ell]
            area = 0.5 * (
                (p0x * head[1] - p0y * head[0])
                + chain
                + (bj[0] * qy - bj[1] * qx)
                + (qx * p0y - qy * p0x)
            )
            cand = np.where(valid, area, np.inf)
            np.minimum(best, cand, out=best)
    return np.maximum(best, 0.0)


def wet_part_area(
    polygon: Polygon,
    delta: float,
    stream: RandomStream,
    m: int,
    chunk: int = 500_000,
) -> tuple[float, float]:
    """Monte Carlo estimate of area{z : v(z) < delta} with its standard error."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if m < 1:
        raise ValueError("need at least one evaluation point")
    gen = stream.generator()
    hits = 0
    done = 0
    while done < m:
        count = min(chunk, m - done)
        pts = uniform_points(polygon, count, gen)
        hits += int((v_values(polygon, pts) < delta).sum())
        done += count
    frac = hits / m
    total = polygon.area
    estimate = total * frac
    stderr = total * math.sqrt(max(frac * (1.0 - frac), 0.0) / m)
    return estimate, stderr


def floating_body_probes(
    polygon: Polygon, delta: float, count: int = 256
) -> np.ndarray:
    """Boundary probes of the floating body {v >= delta} plus the centroid.

    Probes are found by bisecting v along `count` rays from the centroid to
    the container boundary. Requires v(centroid) >= delta.
    """
    c = polygon.centroid
    if float(v_values(polygon, c[None, :])[0]) < delta:
        raise ValueError("floating body threshold exceeds v at the centroid")
    angles = 2.0 * math.pi * np.arange(count) / count
    dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    # ray-boundary intersection: smallest positive t with c + t*d on an edge line
    normals, offsets = polygon._edge_normals
    t_edge = np.full(count, np.inf)
    for k in range(len(normals)):
        denom = dirs @ normals[k]
        num = offsets[k] - c @ normals[k]
        with np.errstate(divide="ignore"):
            t = np.where(denom < 0.0, num / denom, np.inf)
        np.minimum(t_edge, t, out=t_edge)
    boundary = c + t_edge[:, None] * dirs
    lo = np.zeros(count)
    hi = np.ones(count)
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        probe = c + mid[:, None] * (boundary - c)
        inside = v_values(polygon, probe) >= delta
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    probes = c + lo[:, None] * (boundary - c)
    return np.vstack([probes, c])


@dataclass(frozen=True)
class FloatingEvents:
    """Outcome of the floating-body events for one sample.

    `covered` is the containment event (every floating-body probe lies in the
    sample hull); `wet_count_ok` bounds the number of sample points in the
    wet part by c0 (log n)^2. `trivial` flags thresholds at or above the
    maximum of v, where containment holds vacuously.
    """

    covered: bool
    wet_count_ok: bool
    trivial: bool
    delta: float
    wet_points: int


def floating_events(
    polygon: Polygon,
    sample: PointSample,
    n: float,
    params: EventParams = EventParams(),
    probes: np.ndarray | None = None,
) -> FloatingEvents:
    """Evaluate the containment event and the wet-point-count event.

    The threshold is delta = b0 * log(n) / n. Probes may be precomputed with
    `floating_body_probes` and reused across replications.
    """
    if n <= 1:
        raise ValueError("n must exceed 1")
    delta = params.b0 * math.log(n) / n
    points = sample.points
    wet_points = (
        int((v_values(polygon, points) < delta).sum()) if len(points) else 0
    )
    wet_ok = wet_points <= params.c0 * math.log(n) ** 2
    if probes is None:
        try:
            probes = floating_body_probes(polygon, delta)
        except ValueError:
            return FloatingEvents(True, wet_ok, True, delta, wet_points)
    hull = convex_hull(points) if len(points) else None
    if hull is None or vertex_count(hull) < 3:
        return FloatingEvents(False, wet_ok, False, delta, wet_points)
    covered = bool(hull.contains_many(probes).all())
    return FloatingEvents(covered, wet_ok, False, delta, wet_points)
