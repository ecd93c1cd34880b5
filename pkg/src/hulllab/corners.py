"""Corner decomposition of a sample in a convex container.

For each container edge, the support point is the sample point closest to
that edge's line; the support lines through adjacent support points meet in
an apex, and the triangle (support point, apex, next support point) collects
the sample points that can contribute hull vertices between the two support
points. Summing the chain vertex counts of the corner triangles recovers the
hull vertex count exactly whenever the support points are pairwise distinct.

The regularity event requires every support point to sit within n^(-3/4) of
its edge and both triangle arms to be at least n^(-1/4) long.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import chain_vertex_count
from .geometry import (
    Polygon,
    _ORIENT_GUARD,
    map_triangle_to_canonical,
    orient,
    polygon_metrics,
)
from .sampling import (
    PointSample,
    RandomStream,
    replication_generator,
    uniform_points,
)


@dataclass(frozen=True)
class CornerDecomposition:
    """Support points, apexes and corner triangles of one sample.

    Index convention: edge i runs from vertex i-1 to vertex i; corner i is
    the corner triangle between support points i and i+1 (cyclic), with apex
    at the intersection of their support lines. `arm_lengths[i, 0]` is the
    distance from support point i to apex i along support line i and
    `arm_lengths[i, 1]` the distance from apex i to support point i+1.
    """

    support_points: np.ndarray  # (ell, 2)
    support_indices: np.ndarray  # (ell,) indices into the sample
    apexes: np.ndarray  # (ell, 2)
    arm_lengths: np.ndarray  # (ell, 2)
    edge_distances: np.ndarray  # (ell,) point-to-edge-segment distances
    distinct: np.ndarray  # (ell,) support point i != support point i+1
    support_ok: bool  # supports distinct and within n^(-3/4) of their edges
    is_regular: bool  # support_ok plus both arms >= n^(-1/4) everywhere

    @property
    def all_distinct(self) -> bool:
        return bool(self.distinct.all())

    def triangle(self, i: int) -> np.ndarray:
        ell = len(self.support_points)
        return np.vstack(
            [
                self.support_points[i],
                self.apexes[i],
                self.support_points[(i + 1) % ell],
            ]
        )

    def triangle_areas(self) -> np.ndarray:
        a = self.support_points
        b = self.apexes
        c = np.roll(self.support_points, -1, axis=0)
        return 0.5 * np.abs(
            (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
            - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
        )


def _segment_distances(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from each point to the segment [a, b]."""
    d = b - a
    length2 = float(d @ d)
    t = np.clip(((points - a) @ d) / length2, 0.0, 1.0)
    foot = a + t[:, None] * d
    diff = points - foot
    return np.hypot(diff[:, 0], diff[:, 1])


def build_decomposition(
    polygon: Polygon, sample: PointSample, n: float
) -> CornerDecomposition:
    """Support points, apexes, arms and the regularity event for one sample.

    Per edge, the support point is the sample point of minimal inward line
    distance (ties broken by lowest index). `n` enters only through the
    regularity thresholds n^(-3/4) and n^(-1/4).
    """
    points = sample.points
    if len(points) == 0:
        raise ValueError("sample is empty")
    v = polygon.vertices
    ell = len(v)
    normals, offsets = polygon._edge_normals
    # geometry stores edge k from vertex k to k+1; re-index so that entry i
    # refers to the edge from vertex i-1 to vertex i
    normals = np.roll(normals, 1, axis=0)
    offsets = np.roll(offsets, 1)
    depth = points @ normals.T - offsets  # (m, ell) inward distances
    support_idx = depth.argmin(axis=0)
    support = points[support_idx]
    edge_dir = v - np.roll(v, 1, axis=0)
    edge_dir = edge_dir / np.hypot(edge_dir[:, 0], edge_dir[:, 1])[:, None]

    apexes = np.empty((ell, 2))
    arms = np.empty((ell, 2))
    for i in range(ell):
        j = (i + 1) % ell
        zi = support[i]
        zj = support[j]
        di = edge_dir[i]
        nj = normals[j]
        denom = float(nj @ di)
        # adjacent edges of a strictly convex polygon are never parallel
        s = float(nj @ (zj - zi)) / denom
        apex = zi + s * di
        apexes[i] = apex
        arms[i, 0] = math.hypot(apex[0] - zi[0], apex[1] - zi[1])
        arms[i, 1] = math.hypot(apex[0] - zj[0], apex[1] - zj[1])

    prev_v = np.roll(v, 1, axis=0)
    edge_distances = np.empty(ell)
    for i in range(ell):
        edge_distances[i] = _segment_distances(support[i : i + 1], prev_v[i], v[i])[0]

    distinct = support_idx != np.roll(support_idx, -1)
    support_ok = bool(distinct.all() and (edge_distances <= n ** (-0.75)).all())
    regular = bool(support_ok and (arms >= n ** (-0.25)).all())
    return CornerDecomposition(
        support_points=support,
        support_indices=support_idx,
        apexes=apexes,
        arm_lengths=arms,
        edge_distances=edge_distances,
        distinct=distinct,
        support_ok=support_ok,
        is_regular=regular,
    )


def _points_in_triangle(
    points: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray
) -> np.ndarray:
    """Boolean mask of points in the closed CCW triangle (a, b, c).

    Borderline points (within the float error bound of an edge) are resolved
    with the exact orientation predicate.
    """
    mask = np.ones(len(points), dtype=bool)
    uncertain = np.zeros(len(points), dtype=bool)
    px = points[:, 0]
    py = points[:, 1]
    for p0, p1 in ((a, b), (b, c), (c, a)):
        left = (p1[0] - p0[0]) * (py - p0[1])
        right = (p1[1] - p0[1]) * (px - p0[0])
        det = left - right
        guard = _ORIENT_GUARD * (np.abs(left) + np.abs(right))
        mask &= det >= -guard
        uncertain |= np.abs(det) <= guard
    for idx in np.flatnonzero(uncertain & mask):
        p = points[idx]
        mask[idx] = (
            orient(a, b, p) >= 0 and orient(b, c, p) >= 0 and orient(c, a, p) >= 0
        )
    return mask


def decomposed_vertex_count(
    polygon: Polygon,
    sample: PointSample,
    decomposition: CornerDecomposition | None = None,
) -> int:
    """Hull vertex count assembled from the corner chains.

    Maps each corner triangle to the canonical triangle, counts the chain
    vertices of the mapped points, and returns ell plus the sum of the chain
    contributions. Equals the direct hull vertex count exactly whenever all
    support points are distinct; raises otherwise.
    """
    if decomposition is None:
        decomposition = build_decomposition(polygon, sample, max(len(sample), 2))
    if not decomposition.all_distinct:
        raise ValueError("support points are not pairwise distinct")
    points = sample.points
    ell = len(polygon.vertices)
    support_idx = decomposition.support_indices
    total = ell
    for i in range(ell):
        j = (i + 1) % ell
        zi = decomposition.support_points[i]
        apex = decomposition.apexes[i]
        zj = decomposition.support_points[j]
        inside = _points_in_triangle(points, zi, apex, zj)
        inside[support_idx[i]] = False
        inside[support_idx[j]] = False
        members = points[inside]
        if len(members) == 0:
            continue
        to_canonical = map_triangle_to_canonical(zi, apex, zj)
        total += chain_vertex_count(to_canonical(members)) - 2
    return total


@dataclass(frozen=True)
class TailCheck:
    """Per-edge empirical exceedance of the support distance against the
    exponential void bound exp(-n * edge_length / 2 * x)."""

    x: float
    empirical: np.ndarray
    stderr: np.ndarray
    bound: np.ndarray
    reps: int


def tail_probability_check(
    polygon: Polygon, n: float, x: float, reps: int, stream: RandomStream
) -> TailCheck:
    """Estimate P(support distance >= x) per edge under the Poisson model."""
    if x <= 0:
        raise ValueError("x must be positive")
    metrics = polygon_metrics(polygon)
    ell = metrics.ell
    exceed = np.zeros(ell, dtype=np.int64)
    used = 0
    keys = stream.replication_keys(reps)
    for i in range(reps):
        s = _poisson_sample_keyed(polygon, n, keys, i)
        if len(s) == 0:
            continue
        d = build_decomposition(polygon, s, n).edge_distances
        exceed += d >= x
        used += 1
    p_hat = exceed / max(used, 1)
    stderr = np.sqrt(np.maximum(p_hat * (1.0 - p_hat), 0.0) / max(used, 1))
    bound = np.exp(-n * metrics.edge_lengths / 2.0 * x)
    return TailCheck(x=x, empirical=p_hat, stderr=stderr, bound=bound, reps=used)


def _poisson_sample_keyed(
    polygon: Polygon, n: float, keys: np.ndarray, index: int
) -> PointSample:
    gen = replication_generator(keys, index)
    count = int(gen.poisson(n))
    return PointSample(uniform_points(polygon, count, gen), "poisson", n, polygon)


@dataclass(frozen=True)
class LogMomentEstimates:
    """Conditional log-moment estimates of the corner construction.

    `arm_mean[i, k]` estimates E[log arm_{i,k} | conditioning] for k in
    {0, 1} (arm 0 lies along support line i, arm 1 along support line i+1);
    predicted values are log(edge length) - 1 for the matching edge. Area
    rows estimate moments of log area of the corner triangles with predicted
    mean log(corner area) - 2, predicted variance 2, and predicted covariance
    1 - pi^2/6 for cyclically adjacent corners (0 otherwise).

    The predictions correspond to support-point positions integrated over
    their whole support segments, which is conditioning "support" (supports
    distinct and within n^(-3/4) of their edges). Conditioning "regular"
    additionally truncates both arms at n^(-1/4); that truncation removes
    the small-arm tail of the log, shifting every moment by Theta(n^(-1/4)
    log n), e.g. the arm mean from -1 to about -0.83 at n = 1e4 on the unit
    square.
    """

    condition: str
    reps: int
    kept: int
    kept_rate: float
    arm_mean: np.ndarray
    arm_mean_stderr: np.ndarray
    arm_mean_predicted: np.ndarray
    area_mean: np.ndarray
    area_mean_stderr: np.ndarray
    area_mean_predicted: np.ndarray
    area_var: np.ndarray
    area_var_stderr: np.ndarray
    area_var_predicted: float
    area_cov: np.ndarray
    area_cov_stderr: np.ndarray
    area_cov_predicted: np.ndarray


def log_moment_estimates(
    polygon: Polygon,
    n: float,
    reps: int,
    stream: RandomStream,
    condition: str = "support",
) -> LogMomentEstimates:
    """Monte Carlo conditional log moments of arms and corner-triangle areas.

    Conditioning is by rejection. `condition` is "support" (default; the
    event whose moments match the closed-form predictions, see
    LogMomentEstimates) or "regular" (additionally truncates the arms at
    n^(-1/4)). Raises if fewer than 100 replications satisfy the chosen
    conditioning, reporting the observed rate.
    """
    if n < 100:
        raise ValueError("n must be at least 100")
    if reps < 1000:
        raise ValueError("need at least 1000 replications")
    if condition not in ("support", "regular"):
        raise ValueError("condition must be 'support' or 'regular'")
    metrics = polygon_metrics(polygon)
    ell = metrics.ell
    keys = stream.replication_keys(reps)
    log_arms = []
    for i in range(reps):
        s = _poisson_sample_keyed(polygon, n, keys, i)
        if len(s) == 0:
            continue
        dec = build_decomposition(polygon, s, n)
        keep = dec.support_ok if condition == "support" else dec.is_regular
        if keep:
            log_arms.append(np.log(dec.arm_lengths))
    kept = len(log_arms)
    rate = kept / reps
    if kept < 100:
        raise ValueError(
            f"only {kept} of {reps} replications satisfied the {condition} "
            f"regularity conditioning (rate {rate:.4f}); need at least 100"
        )
    arms = np.asarray(log_arms)  # (kept, ell, 2)
    sin_half = np.log(np.sin(metrics.angles) / 2.0)
    log_area = sin_half[None, :] + arms[:, :, 0] + arms[:, :, 1]  # (kept, ell)

    arm_mean = arms.mean(axis=0)
    arm_mean_stderr = arms.std(axis=0, ddof=1) / math.sqrt(kept)
    next_lengths = np.roll(metrics.edge_lengths, -1)
    arm_pred = np.column_stack(
        [np.log(metrics.edge_lengths) - 1.0, np.log(next_lengths) - 1.0]
    )

    centered = log_area - log_area.mean(axis=0)
    m2 = (centered**2).mean(axis=0)
    m4 = (centered**4).mean(axis=0)
    area_mean = log_area.mean(axis=0)
    area_mean_stderr = np.sqrt(m2 / kept)
    area_var = m2 * kept / (kept - 1)
    area_var_stderr = np.sqrt(
        np.maximum(m4 - (kept - 3) / (kept - 1) * m2 * m2, 0.0) / kept
    )

    cov = (centered.T @ centered) / (kept - 1)
    second = centered**2
    m22 = (second.T @ second) / kept  # E[(X-x)^2 (Y-y)^2] entrywise
    cov_stderr = np.sqrt(np.maximum(m22 - cov * cov, 0.0) / kept)
    adjacency = np.zeros((ell, ell))
    for i in range(ell):
        adjacency[i, (i + 1) % ell] = 1.0
        adjacency[i, (i - 1) % ell] = 1.0
    cov_pred = adjacency * (1.0 - math.pi**2 / 6.0)

    return LogMomentEstimates(
        condition=condition,
        reps=reps,
        kept=kept,
        kept_rate=rate,
        arm_mean=arm_mean,
        arm_mean_stderr=arm_mean_stderr,
        arm_mean_predicted=arm_pred,
        area_mean=area_mean,
        area_mean_stderr=area_mean_stderr,
        area_mean_predicted=np.log(metrics.corner_areas) - 2.0,
        area_var=area_var,
        area_var_stderr=area_var_stderr,
        area_var_predicted=2.0,
        area_cov=cov,
        area_cov_stderr=cov_stderr,
        area_cov_predicted=cov_pred,
    )


@dataclass(frozen=True)
class EventRate:
    """Empirical probability that the regularity event fails."""

    n: float
    reps: int
    failure_rate: float
    stderr: float
    lower_curve: float  # order n^-1 lower bracket
    upper_curve: float  # order n^-1/4 upper bracket


def regularity_event_rate(polygon: Polygon, n: float, reps: int, stream: RandomStream) -> EventRate:
    """Empirical failure rate of the regularity event with bracketing curves."""
    if reps < 1000:
        raise ValueError("need at least 1000 replications")
    keys = stream.replication_keys(reps)
    failures = 0
    for i in range(reps):
        s = _poisson_sample_keyed(polygon, n, keys, i)
        if len(s) == 0:
            failures += 1
            continue
        if not build_decomposition(polygon, s, n).is_regular:
            failures += 1
    rate = failures / reps
    stderr = math.sqrt(max(rate * (1.0 - rate), 0.0) / reps)
    return EventRate(
        n=n,
        reps=reps,
        failure_rate=rate,
        stderr=stderr,
        lower_curve=1.0 / n,
        upper_curve=n ** (-0.25),
    )
