"""Planar geometry kernel: exact-sign predicates, convex hulls, clipping, affine maps.

Containers are strictly convex polygons with counterclockwise vertex order.
All operations are pure functions of their inputs; polygon vertex arrays are
frozen after construction and safe to share across threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

# Float filter constant for the orientation sign, (3 + 16u)u with u = 2^-53.
# If |det| exceeds this bound times the magnitude of the two products, the
# floating-point sign is provably the exact sign.
_ORIENT_GUARD = 3.3306690738754716e-16

# Below this many points the directional prefilter costs more than it saves
# (measured crossover of the vectorized filter vs the direct scan).
_PREFILTER_MIN = 1536

_F32_EPS = float(np.finfo(np.float32).eps)


def orient(a, b, c) -> int:
    """Exact sign of twice the signed area of triangle (a, b, c).

    Returns +1 for a counterclockwise turn, -1 for clockwise, 0 for collinear.
    A floating-point filter decides almost all inputs; near-degenerate triples
    fall back to exact rational arithmetic, so the sign is always exact.
    """
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    cx, cy = float(c[0]), float(c[1])
    left = (ax - cx) * (by - cy)
    right = (ay - cy) * (bx - cx)
    det = left - right
    guard = _ORIENT_GUARD * (abs(left) + abs(right))
    if det > guard:
        return 1
    if det < -guard:
        return -1
    return _orient_exact(ax, ay, bx, by, cx, cy)


def _orient_exact(ax, ay, bx, by, cx, cy) -> int:
    det = (Fraction(ax) - Fraction(cx)) * (Fraction(by) - Fraction(cy)) - (
        Fraction(ay) - Fraction(cy)
    ) * (Fraction(bx) - Fraction(cx))
    if det > 0:
        return 1
    if det < 0:
        return -1
    return 0


def shoelace_area(vertices: np.ndarray) -> float:
    """Signed shoelace area of a closed vertex loop (positive when CCW)."""
    x = vertices[:, 0]
    y = vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


class Polygon:
    """Strictly convex polygon with counterclockwise vertices.

    Validation rejects repeated, collinear or clockwise vertex lists and
    reports the offending vertex index. The vertex array is made read-only.
    """

    def __init__(self, vertices, validate: bool = True):
        arr = np.ascontiguousarray(vertices, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("vertices must be an (n, 2) array")
        if validate:
            self._validate(arr)
        arr.setflags(write=False)
        self.vertices = arr

    @staticmethod
    def _validate(arr: np.ndarray) -> None:
        n = len(arr)
        if n < 3:
            raise ValueError(f"polygon needs at least 3 vertices, got {n}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("polygon vertices must be finite")
        for i in range(n):
            s = orient(arr[i - 1], arr[i], arr[(i + 1) % n])
            if s == 0:
                raise ValueError(
                    f"vertex {i} is collinear with or equal to its neighbours"
                )
            if s < 0:
                raise ValueError(
                    f"vertex {i} makes a clockwise turn; polygon must be "
                    "strictly convex and counterclockwise"
                )

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"Polygon({len(self)} vertices, area={self.area:.6g})"

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @cached_property
    def area(self) -> float:
        return shoelace_area(self.vertices)

    @cached_property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - v[:, 1] * w[:, 0]
        c = ((v + w) * cross[:, None]).sum(axis=0) / (6.0 * self.area)
        c.setflags(write=False)
        return c

    @cached_property
    def diameter(self) -> float:
        v = self.vertices
        d = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((d * d).sum(axis=2)).max())

    @cached_property
    def _edge_normals(self):
        """Inward unit normals and offsets: inside iff n.x >= off for all edges."""
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(e[:, 0], e[:, 1])
        normals = np.column_stack([-e[:, 1], e[:, 0]]) / lengths[:, None]
        offsets = (normals * v).sum(axis=1)
        normals.setflags(write=False)
        offsets.setflags(write=False)
        return normals, offsets

    def contains(self, point, tol: float = 1e-12) -> bool:
        """Boundary-inclusive membership with `tol` slack in units of diameter."""
        normals, offsets = self._edge_normals
        depth = normals @ np.asarray(point, dtype=np.float64) - offsets
        return bool(depth.min() >= -tol * self.diameter)

    def contains_many(self, points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        normals, offsets = self._edge_normals
        depth = points @ normals.T - offsets
        return depth.min(axis=1) >= -tol * self.diameter

    def boundary_distance(self, point) -> float:
        """Smallest inward line distance; negative outside, 0 on the boundary."""
        normals, offsets = self._edge_normals
        depth = normals @ np.asarray(point, dtype=np.float64) - offsets
        return float(depth.min())


@dataclass(frozen=True)
class DegenerateHull:
    """Hull of a point set with fewer than 3 extreme points."""

    extreme_points: np.ndarray

    @property
    def vertex_count(self) -> int:
        return len(self.extreme_points)


def vertex_count(hull) -> int:
    """Number of vertices of a `Polygon` or `DegenerateHull`."""
    return hull.vertex_count


@dataclass(frozen=True)
class PolygonMetrics:
    """Per-polygon metrics; edge i runs from vertex i-1 to vertex i (cyclic)."""

    ell: int
    edge_lengths: np.ndarray
    angles: np.ndarray
    corner_areas: np.ndarray
    total_area: float


def polygon_area(polygon: Polygon) -> float:
    """Area of a convex polygon (shoelace value)."""
    return shoelace_area(polygon.vertices)


def polygon_metrics(polygon: Polygon) -> PolygonMetrics:
    """Edge lengths, interior angles and corner triangle areas.

    `corner_areas[i]` is the area of the triangle spanned by vertices
    i-1, i, i+1, which satisfies corner_areas[i] =
    (sin(angles[i]) / 2) * edge_lengths[i] * edge_lengths[i+1].
    """
    v = polygon.vertices
    prev = np.roll(v, 1, axis=0)
    nxt = np.roll(v, -1, axis=0)
    incoming = v - prev
    outgoing = nxt - v
    edge_lengths = np.hypot(incoming[:, 0], incoming[:, 1])
    cross = incoming[:, 0] * outgoing[:, 1] - incoming[:, 1] * outgoing[:, 0]
    dot = (incoming * outgoing).sum(axis=1)
    # interior angle = pi - turn angle
    angles = math.pi - np.arctan2(cross, dot)
    corner_areas = 0.5 * cross
    return PolygonMetrics(
        ell=len(v),
        edge_lengths=edge_lengths,
        angles=angles,
        corner_areas=corner_areas,
        total_area=polygon.area,
    )


def normalize_to_unit_area(polygon: Polygon) -> Polygon:
    """Uniformly rescale about the centroid so that the area becomes 1."""
    scale = 1.0 / math.sqrt(polygon.area)
    c = polygon.centroid
    return Polygon(c + scale * (polygon.vertices - c))


def unit_square() -> Polygon:
    return Polygon([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])


def unit_area_triangle() -> Polygon:
    """Right isosceles triangle with legs sqrt(2), area exactly 1."""
    s = math.sqrt(2.0)
    return Polygon([(0.0, 0.0), (s, 0.0), (0.0, s)])


def canonical_triangle() -> Polygon:
    """Triangle with vertices (0,0), (1,0), (0,1); area 1/2."""
    return Polygon([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])


def regular_polygon(k: int, area: float = 1.0) -> Polygon:
    """Regular k-gon centred at the origin with the given area."""
    if k < 3:
        raise ValueError("a polygon needs k >= 3 vertices")
    angles = 2.0 * math.pi * np.arange(k) / k
    raw = np.column_stack([np.cos(angles), np.sin(angles)])
    raw_area = 0.5 * k * math.sin(2.0 * math.pi / k)
    return Polygon(raw * math.sqrt(area / raw_area))


# ---------------------------------------------------------------------------
# Convex hulls


def _cross_sign(o, a, b) -> int:
    """Exact turn sign o->a->b with a float filter, operating on 2-tuples."""
    left = (a[0] - o[0]) * (b[1] - o[1])
    right = (a[1] - o[1]) * (b[0] - o[0])
    det = left - right
    guard = _ORIENT_GUARD * (abs(left) + abs(right))
    if det > guard:
        return 1
    if det < -guard:
        return -1
    return _orient_exact(a[0], a[1], b[0], b[1], o[0], o[1])


def _chain_sorted(points: list) -> list:
    """Monotone chain over lexicographically sorted points.

    Keeps only strict turns, so collinear boundary points and duplicates are
    excluded and the result is strictly convex. Returns CCW vertices starting
    at the lexicographic minimum; fewer than 3 entries means degenerate input.
    """
    if len(points) <= 2:
        out = [points[0]] if points else []
        if len(points) == 2 and points[1] != points[0]:
            out.append(points[1])
        return out
    lower = []
    for p in points:
        while len(lower) > 1 and _cross_sign(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(points):
        while len(upper) > 1 and _cross_sign(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    if len(lower) == 2 and len(upper) == 2:
        return lower  # all points collinear: the two endpoints
    return lower[:-1] + upper[:-1]


def _prefilter_cols(px: np.ndarray, py: np.ndarray):
    """Directional candidate filter: drop points certainly inside the octagon
    spanned by the 8 extreme points in the directions +-x, +-y, +-(x+y),
    +-(x-y).

    Every dropped point is strictly inside the convex hull of the kept ones,
    so the hull of the kept points equals the hull of the full set. The inner
    test runs in float32 with a conservative error margin: points within the
    margin of an octagon edge are kept, never dropped.
    """
    s = px + py
    d = px - py
    cand = set()
    for arr in (px, py, s, d):
        cand.add(int(np.argmin(arr)))
        cand.add(int(np.argmax(arr)))
    idx = sorted(cand)
    qx = px[idx]
    qy = py[idx]
    if len(idx) < 3:
        return px, py
    cx, cy = qx.mean(), qy.mean()
    order = np.argsort(np.arctan2(qy - cy, qx - cx))
    qx = qx[order]
    qy = qy[order]
    ex = np.roll(qx, -1) - qx
    ey = np.roll(qy, -1) - qy
    # interior of the CCW octagon: alpha*x + beta*y > c strictly on every edge
    alpha = -ey
    beta = ex
    c = alpha * qx + beta * qy
    mx = float(np.abs(qx).max())
    my = float(np.abs(qy).max())
    margin = 8.0 * _F32_EPS * (np.abs(alpha) * mx + np.abs(beta) * my + np.abs(c))
    x32 = px.astype(np.float32)
    y32 = py.astype(np.float32)
    inside = np.ones(len(px), dtype=bool)
    for j in range(len(qx)):
        t = np.float32(alpha[j]) * x32
        t += np.float32(beta[j]) * y32
        inside &= t > np.float32(c[j] + margin[j])
    keep = np.flatnonzero(~inside)
    return px[keep], py[keep]


def _hull_points_cols(px: np.ndarray, py: np.ndarray) -> list:
    """CCW strict hull vertices of the points given as coordinate columns."""
    if len(px) >= _PREFILTER_MIN:
        px, py = _prefilter_cols(px, py)
    order = np.lexsort((py, px))
    pts = list(zip(px[order].tolist(), py[order].tolist()))
    return _chain_sorted(pts)


def hull_vertex_count(points: np.ndarray) -> int:
    """Number of strict hull vertices of a point array (0, 1, 2 possible)."""
    points = np.asarray(points, dtype=np.float64)
    if len(points) == 0:
        return 0
    return len(_hull_points_cols(np.ascontiguousarray(points[:, 0]),
                                 np.ascontiguousarray(points[:, 1])))


def hull_count_and_area(px: np.ndarray, py: np.ndarray) -> tuple[int, float]:
    """Hull vertex count plus hull area from coordinate columns (fast path)."""
    if len(px) == 0:
        return 0, 0.0
    verts = _hull_points_cols(px, py)
    k = len(verts)
    if k < 3:
        return k, 0.0
    area = 0.0
    x0, y0 = verts[-1]
    for x1, y1 in verts:
        area += x0 * y1 - y0 * x1
        x0, y0 = x1, y1
    return k, 0.5 * area


def convex_hull(points) -> Polygon | DegenerateHull:
    """Strictly convex hull of a point set.

    Returns the hull as a CCW `Polygon` whose vertex set is a subset of the
    input (collinear boundary points excluded), or a `DegenerateHull` marker
    carrying the 0, 1 or 2 extreme points when no proper polygon exists.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        return DegenerateHull(np.empty((0, 2)))
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be an (n, 2) array")
    verts = _hull_points_cols(np.ascontiguousarray(pts[:, 0]),
                              np.ascontiguousarray(pts[:, 1]))
    if len(verts) < 3:
        return DegenerateHull(np.asarray(verts, dtype=np.float64).reshape(-1, 2))
    return Polygon(np.asarray(verts, dtype=np.float64), validate=False)


# ---------------------------------------------------------------------------
# Affine maps


@dataclass(frozen=True)
class AffineMap:
    """Invertible planar affine map x -> linear @ x + translation."""

    linear: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        lin = np.asarray(self.linear, dtype=np.float64).reshape(2, 2)
        tr = np.asarray(self.translation, dtype=np.float64).reshape(2)
        if abs(lin[0, 0] * lin[1, 1] - lin[0, 1] * lin[1, 0]) == 0.0:
            raise ValueError("affine map must be invertible")
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", tr)

    @property
    def determinant(self) -> float:
        lin = self.linear
        return float(lin[0, 0] * lin[1, 1] - lin[0, 1] * lin[1, 0])

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        return pts @ self.linear.T + self.translation

    def inverse(self) -> "AffineMap":
        inv = np.linalg.inv(self.linear)
        return AffineMap(inv, -inv @ self.translation)


def map_triangle_to_canonical(a, apex, b) -> AffineMap:
    """Affine map sending a -> (0, 1), apex -> (0, 0), b -> (1, 0).

    The absolute determinant equals 1 / (2 * area(a, apex, b)).
    """
    a = np.asarray(a, dtype=np.float64)
    apex = np.asarray(apex, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if orient(a, apex, b) == 0:
        raise ValueError("triangle vertices are collinear")
    u = a - apex
    w = b - apex
    det = u[0] * w[1] - u[1] * w[0]
    linear = np.array([[-u[1], u[0]], [w[1], -w[0]]]) / det
    return AffineMap(linear, -linear @ apex)


# ---------------------------------------------------------------------------
# Half-planes and clipping


@dataclass(frozen=True)
class HalfPlane:
    """Oriented line u . x = t with lower side {u . x <= t}."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=np.float64).reshape(2)
        norm = math.hypot(n[0], n[1])
        if abs(norm - 1.0) > 1e-12:
            raise ValueError("half-plane normal must be a unit vector")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_direction(cls, theta: float, point) -> "HalfPlane":
        """Half-plane with normal (cos theta, sin theta) whose boundary passes
        through `point`."""
        n = np.array([math.cos(theta), math.sin(theta)])
        return cls(n, float(n @ np.asarray(point, dtype=np.float64)))


def clip_halfplane(vertices: np.ndarray, normal, offset: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon by {normal . x <= offset}."""
    nx, ny = float(normal[0]), float(normal[1])
    out_x: list[float] = []
    out_y: list[float] = []
    n = len(vertices)
    px, py = float(vertices[-1, 0]), float(vertices[-1, 1])
    pd = nx * px + ny * py - offset
    for i in range(n):
        cx, cy = float(vertices[i, 0]), float(vertices[i, 1])
        cd = nx * cx + ny * cy - offset
        if cd <= 0.0:
            if pd > 0.0:
                t = pd / (pd - cd)
                out_x.append(px + t * (cx - px))
                out_y.append(py + t * (cy - py))
            out_x.append(cx)
            out_y.append(cy)
        elif pd <= 0.0:
            t = pd / (pd - cd)
            out_x.append(px + t * (cx - px))
            out_y.append(py + t * (cy - py))
        px, py, pd = cx, cy, cd
    return np.column_stack([out_x, out_y]) if out_x else np.empty((0, 2))
