import math

import numpy as np
import pytest

from hulllab.geometry import (
    AffineMap,
    DegenerateHull,
    Polygon,
    convex_hull,
    map_triangle_to_canonical,
    normalize_to_unit_area,
    orient,
    polygon_area,
    polygon_metrics,
    regular_polygon,
    unit_area_triangle,
    unit_square,
    vertex_count,
)
from oracles import extreme_vertex_set, fan_area, random_convex_polygon


class TestOrient:
    def test_ccw(self):
        assert orient((0, 0), (1, 0), (0, 1)) == 1

    def test_collinear(self):
        assert orient((0, 0), (1, 1), (2, 2)) == 0

    def test_cw(self):
        assert orient((0, 0), (0, 1), (1, 0)) == -1

    def test_near_degenerate_exact(self):
        # differences of ~1ulp around an exactly collinear triple
        a = (0.0, 0.0)
        b = (1.0, 1.0)
        assert orient(a, b, (0.5, 0.5)) == 0
        assert orient(a, b, (0.5, np.nextafter(0.5, 1.0))) == 1
        assert orient(a, b, (0.5, np.nextafter(0.5, -1.0))) == -1

    def test_antisymmetry_random(self, rng):
        for _ in range(200):
            a, b, c = rng.random((3, 2))
            assert orient(a, b, c) == -orient(a, c, b)


class TestPolygonValidation:
    def test_too_few(self):
        with pytest.raises(ValueError, match="at least 3"):
            Polygon([(0, 0), (1, 0)])

    def test_collinear_named_index(self):
        with pytest.raises(ValueError, match="vertex 1"):
            Polygon([(0, 0), (1, 0), (2, 0), (1, 1)])

    def test_clockwise_rejected(self):
        with pytest.raises(ValueError, match="clockwise"):
            Polygon([(0, 0), (0, 1), (1, 1), (1, 0)])

    def test_repeated_rejected(self):
        with pytest.raises(ValueError):
            Polygon([(0, 0), (1, 0), (1, 0), (0, 1)])

    def test_vertices_read_only(self, square):
        with pytest.raises(ValueError):
            square.vertices[0, 0] = 5.0


class TestHull:
    def test_three_points(self):
        h = convex_hull([(0.2, 0.1), (0.9, 0.4), (0.3, 0.8)])
        assert isinstance(h, Polygon)
        assert vertex_count(h) == 3

    def test_square_plus_center(self):
        h = convex_hull([(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)])
        assert sorted(map(tuple, h.vertices)) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_ccw_order_from_lex_min(self):
        h = convex_hull([(0, 0), (1, 0), (1, 1), (0, 1)])
        assert h.vertices.tolist() == [[0, 0], [1, 0], [1, 1], [0, 1]]

    def test_collinear_markers(self):
        assert vertex_count(convex_hull([(0, 0), (1, 1), (2, 2)])) == 2
        assert vertex_count(convex_hull([(1, 1), (1, 1)])) == 1
        assert vertex_count(convex_hull(np.empty((0, 2)))) == 0

    def test_collinear_boundary_point_excluded(self):
        h = convex_hull([(0, 0), (2, 0), (1, 0), (1, 1)])
        assert sorted(map(tuple, h.vertices)) == [(0, 0), (1, 1), (2, 0)]

    def test_duplicates_collapse(self):
        h = convex_hull([(0, 0), (0, 0), (1, 0), (1, 1), (1, 1), (0.5, 0.25)])
        assert vertex_count(h) == 3

    def test_idempotence(self, rng):
        for _ in range(50):
            h = convex_hull(rng.random((40, 2)))
            again = convex_hull(h.vertices)
            assert np.array_equal(h.vertices, again.vertices)

    def test_matches_brute_force_oracle(self, rng):
        for _ in range(300):
            n = int(rng.integers(3, 50))
            pts = rng.random((n, 2))
            h = convex_hull(pts)
            got = {tuple(p) for p in h.vertices} if isinstance(h, Polygon) else {
                tuple(p) for p in h.extreme_points
            }
            assert got == extreme_vertex_set(pts)

    def test_prefilter_path_matches_unfiltered_chain(self, rng):
        # the candidate filter must not change the hull
        from hulllab.geometry import _chain_sorted

        for _ in range(10):
            pts = rng.random((5000, 2))
            big = convex_hull(pts)
            order = np.lexsort((pts[:, 1], pts[:, 0]))
            raw = _chain_sorted(list(map(tuple, pts[order])))
            assert big.vertices.tolist() == [list(p) for p in raw]

    def test_affine_equivariance_of_count(self, rng):
        lin = np.array([[2.0, 0.3], [-0.4, 1.5]])
        amap = AffineMap(lin, np.array([3.0, -1.0]))
        for _ in range(30):
            pts = rng.random((60, 2))
            assert vertex_count(convex_hull(pts)) == vertex_count(
                convex_hull(amap(pts))
            )


class TestAreaAndMetrics:
    def test_unit_square_area(self, square):
        assert polygon_area(square) == 1.0

    def test_canonical_triangle_area(self):
        tri = Polygon([(0, 1), (0, 0), (1, 0)], validate=False)
        # vertex order here is CW, shoelace is negative; use the CCW one
        tri = Polygon([(0, 0), (1, 0), (0, 1)])
        assert polygon_area(tri) == 0.5

    def test_fan_triangulation_oracle(self, rng):
        for _ in range(25):
            poly = random_convex_polygon(rng)
            assert polygon_area(poly) == pytest.approx(
                fan_area(poly.vertices), rel=1e-12
            )

    def test_square_metrics(self, square):
        m = polygon_metrics(square)
        assert m.ell == 4
        np.testing.assert_allclose(m.edge_lengths, 1.0)
        np.testing.assert_allclose(m.angles, math.pi / 2)
        np.testing.assert_allclose(m.corner_areas, 0.5)

    def test_triangle_corner_areas_equal_total(self, triangle):
        m = polygon_metrics(triangle)
        np.testing.assert_allclose(m.corner_areas, m.total_area, rtol=1e-12)

    def test_corner_area_identity(self, rng):
        for _ in range(25):
            m = polygon_metrics(random_convex_polygon(rng))
            nxt = np.roll(m.edge_lengths, -1)
            np.testing.assert_allclose(
                m.corner_areas,
                np.sin(m.angles) / 2 * m.edge_lengths * nxt,
                rtol=1e-10,
            )

    def test_angle_range_and_sum(self, rng):
        for _ in range(25):
            m = polygon_metrics(random_convex_polygon(rng))
            assert np.all(m.angles > 0) and np.all(m.angles < math.pi)
            assert m.angles.sum() == pytest.approx((m.ell - 2) * math.pi, abs=1e-9)


class TestNormalize:
    def test_unit_square_fixed(self, square):
        q = normalize_to_unit_area(square)
        np.testing.assert_allclose(q.vertices, square.vertices)

    def test_side_two_square(self):
        p = Polygon([(0, 0), (2, 0), (2, 2), (0, 2)])
        q = normalize_to_unit_area(p)
        assert q.area == pytest.approx(1.0, rel=1e-12)
        np.testing.assert_allclose(q.centroid, p.centroid)
        np.testing.assert_allclose(q.vertices, [(0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5)])

    def test_corner_area_ratios_invariant(self, rng):
        poly = random_convex_polygon(rng)
        scaled = Polygon(poly.vertices * 3.7)
        m0 = polygon_metrics(scaled)
        m1 = polygon_metrics(normalize_to_unit_area(scaled))
        np.testing.assert_allclose(
            m1.corner_areas, m0.corner_areas / m0.total_area, rtol=1e-10
        )

    def test_regular_polygon_area(self):
        for k in (3, 5, 12):
            assert regular_polygon(k).area == pytest.approx(1.0, rel=1e-12)


class TestCanonicalMap:
    def test_identity(self):
        amap = map_triangle_to_canonical((0, 1), (0, 0), (1, 0))
        np.testing.assert_allclose(amap.linear, np.eye(2))
        np.testing.assert_allclose(amap.translation, 0.0)

    def test_double_triangle(self):
        amap = map_triangle_to_canonical((0, 2), (0, 0), (2, 0))
        assert amap.determinant == pytest.approx(0.25)

    def test_collinear_rejected(self):
        with pytest.raises(ValueError, match="collinear"):
            map_triangle_to_canonical((0, 0), (1, 1), (2, 2))

    def test_random_triangles(self, rng):
        for _ in range(50):
            a, apex, b = rng.random((3, 2)) * 4 - 2
            if orient(a, apex, b) == 0:
                continue
            amap = map_triangle_to_canonical(a, apex, b)
            np.testing.assert_allclose(amap(a), (0, 1), atol=1e-10)
            np.testing.assert_allclose(amap(apex), (0, 0), atol=1e-10)
            np.testing.assert_allclose(amap(b), (1, 0), atol=1e-10)
            tri_area = 0.5 * abs(
                (apex[0] - a[0]) * (b[1] - a[1]) - (apex[1] - a[1]) * (b[0] - a[0])
            )
            assert abs(amap.determinant) * tri_area == pytest.approx(0.5, rel=1e-10)
            # interior points map into the canonical triangle
            w = rng.random((20, 3))
            w /= w.sum(axis=1, keepdims=True)
            inside = w @ np.vstack([a, apex, b])
            img = amap(inside)
            assert (img >= -1e-9).all() and (img.sum(axis=1) <= 1 + 1e-9).all()

    def test_inverse_roundtrip(self, rng):
        amap = map_triangle_to_canonical((0.1, 1.9), (-0.3, 0.2), (1.4, 0.1))
        pts = rng.random((10, 2))
        np.testing.assert_allclose(amap.inverse()(amap(pts)), pts, atol=1e-12)


class TestDegenerateHullType:
    def test_marker_fields(self):
        d = convex_hull([(0, 0), (3, 3)])
        assert isinstance(d, DegenerateHull)
        assert d.vertex_count == 2
