"""Seeded random streams and point samplers for the binomial and Poisson models.

Streams are identified by (root_seed, stream_index). The pair is hashed
through `numpy.random.SeedSequence` into a Philox key, a counter-based
construction, so distinct identifiers yield statistically independent
streams while an identical identifier replays the identical point sequence
regardless of process or thread layout. Replication substreams of a batch
are derived in bulk from a tagged child of the same hash, one 128-bit
Philox key per replication index.

Poisson counts come from `numpy.random.Generator.poisson`, which is exact in
distribution for every mean used here (inversion by uniform products for
small means, transformed rejection with a table-backed acceptance step for
large means); no normal approximation is involved.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Polygon

_REPLICATION_TAG = 0x9E3779B9  # distinguishes bulk replication keys from the stream's own generator


@dataclass(frozen=True)
class RandomStream:
    """Reproducible random stream identity.

    `stream_index` is an integer replication or namespace id; `split` pushes a
    further namespace component, which is what batch operations use to keep
    their internal runs independent of each other.
    """

    root_seed: int
    stream_index: int | tuple[int, ...] = 0

    @property
    def key(self) -> tuple[int, ...]:
        idx = self.stream_index
        return idx if isinstance(idx, tuple) else (idx,)

    def split(self, component: int) -> "RandomStream":
        return RandomStream(self.root_seed, self.key + (component,))

    def _seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.root_seed, spawn_key=self.key)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(self._seed_sequence()))

    def replication_keys(self, count: int) -> np.ndarray:
        """(count, 2) uint64 Philox keys, one per replication index."""
        tagged = np.random.SeedSequence(
            self.root_seed, spawn_key=self.key + (_REPLICATION_TAG,)
        )
        return tagged.generate_state(2 * count, np.uint64).reshape(count, 2)


def replication_generator(keys: np.ndarray, index: int) -> np.random.Generator:
    """Generator for one replication out of a bulk key table."""
    return np.random.Generator(np.random.Philox(key=keys[index]))


@dataclass(frozen=True)
class PointSample:
    """A realized point configuration in a container polygon."""

    points: np.ndarray
    model: str  # "binomial" | "poisson"
    n: float  # point count (binomial) or expected count (poisson)
    container: Polygon
    stream: RandomStream | None = None

    def __len__(self) -> int:
        return len(self.points)


class _FanTriangulation:
    """Fan triangulation of a convex polygon from vertex 0.

    Cell order is vertex-index based and the selection weights are area
    ratios, so the construction is equivariant under affine maps of the
    container: mapping the polygon and replaying the same uniforms produces
    the mapped points.
    """

    def __init__(self, polygon: Polygon):
        v = polygon.vertices
        self.apex = v[0].copy()
        self.b = v[1:-1].copy()
        self.c = v[2:].copy()
        cross = (self.b[:, 0] - self.apex[0]) * (self.c[:, 1] - self.apex[1]) - (
            self.b[:, 1] - self.apex[1]
        ) * (self.c[:, 0] - self.apex[0])
        weights = cross / cross.sum()
        self.cumulative = np.cumsum(weights)
        self.cumulative[-1] = 1.0
        self.cells = len(weights)

    def sample(self, gen: np.random.Generator, count: int) -> np.ndarray:
        if count == 0:
            return np.empty((0, 2))
        if self.cells == 1:
            u = gen.random((count, 2))
            r1 = np.sqrt(u[:, 0])
            r12 = r1 * u[:, 1]
            a, b, c = self.apex, self.b[0], self.c[0]
            x = a[0] + r1 * (b[0] - a[0]) + r12 * (c[0] - b[0])
            y = a[1] + r1 * (b[1] - a[1]) + r12 * (c[1] - b[1])
            return np.column_stack([x, y])
        u = gen.random((count, 3))
        cell = np.searchsorted(self.cumulative, u[:, 0])
        r1 = np.sqrt(u[:, 1])
        r12 = r1 * u[:, 2]
        x = np.empty(count)
        y = np.empty(count)
        for k in range(self.cells):
            idx = np.flatnonzero(cell == k)
            if len(idx) == 0:
                continue
            a, b, c = self.apex, self.b[k], self.c[k]
            s1 = r1[idx]
            s12 = r12[idx]
            x[idx] = a[0] + s1 * (b[0] - a[0]) + s12 * (c[0] - b[0])
            y[idx] = a[1] + s1 * (b[1] - a[1]) + s12 * (c[1] - b[1])
        return np.column_stack([x, y])


_fan_cache: dict[int, tuple[Polygon, _FanTriangulation]] = {}


def _fan(polygon: Polygon) -> _FanTriangulation:
    entry = _fan_cache.get(id(polygon))
    if entry is not None and entry[0] is polygon:
        return entry[1]
    fan = _FanTriangulation(polygon)
    if len(_fan_cache) > 64:
        _fan_cache.clear()
    _fan_cache[id(polygon)] = (polygon, fan)
    return fan


def uniform_points(
    polygon: Polygon, count: int, gen: np.random.Generator
) -> np.ndarray:
    """`count` i.i.d. uniform points in the polygon (area-weighted fan cell
    choice followed by square-root barycentric sampling)."""
    return _fan(polygon).sample(gen, count)


def uniform_point(polygon: Polygon, stream: RandomStream) -> np.ndarray:
    """One uniform point in the polygon."""
    return uniform_points(polygon, 1, stream.generator())[0]


def binomial_sample(polygon: Polygon, n: int, stream: RandomStream) -> PointSample:
    """Exactly n i.i.d. uniform points in the container."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    pts = uniform_points(polygon, n, stream.generator())
    return PointSample(pts, "binomial", float(n), polygon, stream)


def poisson_sample(
    polygon: Polygon, expected_count: float, stream: RandomStream
) -> PointSample:
    """Homogeneous Poisson configuration with the given expected point count."""
    if expected_count < 0:
        raise ValueError("expected_count must be nonnegative")
    gen = stream.generator()
    n = int(gen.poisson(expected_count))
    pts = uniform_points(polygon, n, gen)
    return PointSample(pts, "poisson", float(expected_count), polygon, stream)
