"""Convex chains in the canonical triangle: simulation and exact moments.

The canonical triangle T has vertices (0,0), (0,1) and (1,0); a chain is the
convex hull of the two anchors (0,1) and (1,0) together with points inside T.
With k >= 1 uniform points the vertex count has exact moments built from
harmonic sums; the Poissonized model has logarithmic expansions in the
expected point count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import _chain_sorted, _hull_points_cols, canonical_triangle
from .sampling import RandomStream, replication_generator, uniform_points

EULER_GAMMA = float(np.euler_gamma)

CANONICAL_TRIANGLE = canonical_triangle()

ANCHOR_TOP = (0.0, 1.0)
ANCHOR_RIGHT = (1.0, 0.0)


def harmonic(k: int) -> float:
    """Partial sum of 1/i for i = 1..k, summed smallest term first. H_0 = 0."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return math.fsum(1.0 / i for i in range(k, 0, -1))


def harmonic2(k: int) -> float:
    """Partial sum of 1/i^2 for i = 1..k, summed smallest term first."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return math.fsum(1.0 / (i * i) for i in range(k, 0, -1))


def exact_chain_mean(k: int) -> float:
    """Exact expected vertex count of a chain over k >= 1 uniform points."""
    if k < 1:
        raise ValueError("the exact mean formula needs k >= 1")
    return (2.0 / 3.0) * harmonic(k) + 7.0 / 3.0


def exact_chain_var(k: int) -> float:
    """Exact vertex-count variance of a chain over k >= 1 uniform points."""
    if k < 1:
        raise ValueError("the exact variance formula needs k >= 1")
    return (
        (10.0 / 27.0) * harmonic(k)
        + (4.0 / 9.0) * harmonic2(k)
        - 28.0 / 27.0
        + 4.0 / (9.0 * (k + 1.0))
    )


def poisson_chain_expansion(expected_count: float) -> tuple[float, float]:
    """Leading mean/variance expansion for the Poisson chain with mean M > 1.

    mean     = (2/3) log M + (2 gamma + 7) / 3
    variance = (10/27) log M + (10 gamma + 2 pi^2 - 28) / 27
    both up to O(M^{-1/2}).
    """
    if expected_count <= 1.0:
        raise ValueError("the expansion needs an expected count above 1")
    log_m = math.log(expected_count)
    mean = (2.0 / 3.0) * log_m + (2.0 * EULER_GAMMA + 7.0) / 3.0
    var = (10.0 / 27.0) * log_m + (10.0 * EULER_GAMMA + 2.0 * math.pi**2 - 28.0) / 27.0
    return mean, var


def _chain_count_cols(x: np.ndarray, y: np.ndarray) -> int:
    """Chain vertex count from coordinate columns of points interior to T:
    the hull of the points plus the two anchors."""
    ax = np.concatenate([x, (ANCHOR_TOP[0], ANCHOR_RIGHT[0])])
    ay = np.concatenate([y, (ANCHOR_TOP[1], ANCHOR_RIGHT[1])])
    return len(_hull_points_cols(ax, ay))


def chain_vertex_count(points, tol: float = 1e-9) -> int:
    """Vertex count of the hull of `points` plus the anchors (0,1), (1,0).

    Raises if a point lies outside the canonical triangle by more than `tol`.
    The two anchors are always hull vertices, so the count is 2 plus the
    number of chain vertices contributed by the points. Points may touch the
    triangle boundary; this path runs the full hull scan.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        return 2
    x = pts[:, 0]
    y = pts[:, 1]
    if (x < -tol).any() or (y < -tol).any() or (x + y > 1.0 + tol).any():
        raise ValueError("point outside the canonical triangle")
    everything = sorted(set(zip(x.tolist(), y.tolist())) | {ANCHOR_TOP, ANCHOR_RIGHT})
    return len(_chain_sorted(everything))


@dataclass(frozen=True)
class ChainStats:
    """Replication summary for chain vertex counts."""

    reps: int
    mean: float
    variance: float
    stderr_mean: float
    stderr_var: float
    counts: np.ndarray | None = None


def summarize_counts(values: np.ndarray, keep: bool = False) -> ChainStats:
    """Mean/variance with standard errors (variance stderr from the fourth
    central moment)."""
    reps = len(values)
    if reps < 2:
        raise ValueError("need at least 2 replications")
    vals = np.asarray(values, dtype=np.float64)
    mean = float(vals.mean())
    centered = vals - mean
    m2 = float((centered**2).mean())
    m4 = float((centered**4).mean())
    variance = m2 * reps / (reps - 1)
    stderr_mean = math.sqrt(max(m2, 0.0) / reps)
    var_of_var = (m4 - (reps - 3) / (reps - 1) * m2 * m2) / reps
    stderr_var = math.sqrt(max(var_of_var, 0.0))
    return ChainStats(
        reps=reps,
        mean=mean,
        variance=variance,
        stderr_mean=stderr_mean,
        stderr_var=stderr_var,
        counts=np.asarray(values) if keep else None,
    )


def simulate_chain_counts(
    reps: int,
    stream: RandomStream,
    k: int | None = None,
    poisson_mean: float | None = None,
) -> np.ndarray:
    """Raw i.i.d. chain vertex counts under the fixed-k or Poisson model."""
    if (k is None) == (poisson_mean is None):
        raise ValueError("pass exactly one of k or poisson_mean")
    keys = stream.replication_keys(reps)
    counts = np.empty(reps, dtype=np.int64)
    triangle = CANONICAL_TRIANGLE
    for i in range(reps):
        gen = replication_generator(keys, i)
        m = k if k is not None else int(gen.poisson(poisson_mean))
        if m == 0:
            counts[i] = 2
            continue
        pts = uniform_points(triangle, m, gen)
        counts[i] = _chain_count_cols(pts[:, 0], pts[:, 1])
    return counts


def simulate_chain_batch(
    reps: int,
    stream: RandomStream,
    k: int | None = None,
    poisson_mean: float | None = None,
    keep_counts: bool = False,
) -> ChainStats:
    """Replicated chain simulation with summary statistics.

    Each replication draws from its own substream (index-keyed), so results
    do not depend on batching or thread layout.
    """
    if reps < 2:
        raise ValueError("need at least 2 replications")
    counts = simulate_chain_counts(reps, stream, k=k, poisson_mean=poisson_mean)
    return summarize_counts(counts, keep=keep_counts)
