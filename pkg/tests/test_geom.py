from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import brute_hull_2d

from tilegrow.errors import DegenerateHull, Empty, EmptySet, LowerDimensional, Unbounded
from tilegrow.geom import (
    ConvexPolytope3,
    Polygon,
    convex_hausdorff,
    convex_hull,
    convex_hull_2d,
    convex_hull_3d,
    directed_hausdorff,
    halfspace_intersection,
    hausdorff_distance,
    is_centrosymmetric,
    polygon_area,
    sample_boundary,
    simplify_convex,
)

UNIT_SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def _rows(a, nd=9):
    return {tuple(np.round(r, nd) + 0.0) for r in np.asarray(a)}


# -- 2D hull -------------------------------------------------------------------


def test_hull_2d_drops_interior_point():
    h = convex_hull_2d(UNIT_SQUARE + [(0.5, 0.5)])
    assert h.equals(Polygon(UNIT_SQUARE))
    assert np.allclose(h.vertices[0], (0, 0))


def test_hull_2d_collinear_raises():
    with pytest.raises(DegenerateHull):
        convex_hull_2d([(0, 0), (1, 0), (2, 0)])


def test_hull_2d_matches_brute_force():
    rng = np.random.default_rng(7)
    pts = rng.uniform(-1, 1, size=(200, 2))
    assert _rows(convex_hull_2d(pts).vertices) == brute_hull_2d(pts)


def test_hull_2d_drops_collinear_boundary_points():
    pts = UNIT_SQUARE + [(0.5, 0), (1, 0.25), (0.5, 1)]
    assert len(convex_hull_2d(pts)) == 4


def test_hull_is_counterclockwise():
    rng = np.random.default_rng(1)
    h = convex_hull_2d(rng.normal(size=(50, 2)))
    assert polygon_area(h) > 0
    v = h.vertices
    e1, e2 = np.roll(v, -1, axis=0) - v, np.roll(v, -2, axis=0) - np.roll(v, -1, axis=0)
    assert np.all(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0] > 0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-50, 50), st.integers(-50, 50)), min_size=3, max_size=40, unique=True), st.randoms())
def test_hull_2d_idempotent_and_permutation_invariant(pts, rnd):
    pts = np.array(pts, dtype=float)
    try:
        h = convex_hull_2d(pts)
    except DegenerateHull:
        return
    assert h.equals(convex_hull_2d(h.vertices))
    perm = list(range(len(pts)))
    rnd.shuffle(perm)
    assert np.array_equal(convex_hull_2d(pts[perm]).vertices, h.vertices)


# -- 3D hull -------------------------------------------------------------------


def _brute_facets_3d(p, eps=1e-9):
    """Vertices lying on some supporting plane through three points with all points on one side."""
    extreme = set()
    for i, j, k in itertools.combinations(range(len(p)), 3):
        n = np.cross(p[j] - p[i], p[k] - p[i])
        if np.linalg.norm(n) < eps:
            continue
        s = (p - p[i]) @ n
        if np.all(s <= eps) or np.all(s >= -eps):
            extreme.update((i, j, k))
    # drop points that are not vertices (interior to a facet): a vertex is a strict
    # maximizer of some linear functional, which we test with the point-in-hull LP below
    from scipy.optimize import linprog

    out = set()
    for i in extreme:
        others = [m for m in range(len(p)) if m != i]
        a_eq = np.vstack([p[others].T, np.ones(len(others))])
        res = linprog(np.zeros(len(others)), A_eq=a_eq, b_eq=np.append(p[i], 1.0), bounds=(0, None), method="highs")
        if res.status != 0:
            out.add(i)
    return out


def test_hull_3d_octahedron():
    pts = np.vstack([np.eye(3), -np.eye(3)])
    h = convex_hull_3d(pts)
    assert (h.n_vertices, h.n_edges, h.n_faces) == (6, 12, 8)


def test_hull_3d_cube_with_centre():
    cube = np.array(list(itertools.product((0, 1), repeat=3)), dtype=float)
    h = convex_hull_3d(np.vstack([cube, [[0.5, 0.5, 0.5]]]))
    assert h.n_vertices == 8 and h.n_faces == 6 and h.euler_characteristic() == 2


def test_hull_3d_coplanar_raises():
    with pytest.raises(DegenerateHull):
        convex_hull_3d([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)])


def test_hull_3d_matches_brute_force():
    rng = np.random.default_rng(3)
    p = rng.normal(size=(60, 3))
    expected = _rows(p[sorted(_brute_facets_3d(p))])
    h = convex_hull_3d(p)
    assert _rows(h.vertices) == expected
    assert h.euler_characteristic() == 2


def test_hull_3d_faces_outward():
    rng = np.random.default_rng(4)
    h = convex_hull_3d(rng.normal(size=(40, 3)))
    normals, offsets = h.face_planes()
    assert np.all(h.vertices @ normals.T - offsets <= 1e-9)


def test_hull_3d_deterministic_order():
    rng = np.random.default_rng(5)
    p = rng.normal(size=(30, 3))
    a = convex_hull_3d(p)
    b = convex_hull_3d(p[rng.permutation(len(p))])
    assert np.array_equal(a.vertices, b.vertices)
    assert np.array_equal(a.vertices, a.vertices[np.lexsort(a.vertices.T[::-1])])


# -- halfspaces ----------------------------------------------------------------


def test_halfspace_l1_ball_2d():
    hs = [((sx, sy), 1.0) for sx in (1, -1) for sy in (1, -1)]
    assert _rows(halfspace_intersection(hs, 2).vertices) == _rows([(1, 0), (0, 1), (-1, 0), (0, -1)])


def test_halfspace_octahedron_3d():
    hs = [(s, 1.0) for s in itertools.product((1, -1), repeat=3)]
    h = halfspace_intersection(hs, 3)
    assert _rows(h.vertices) == _rows(np.vstack([np.eye(3), -np.eye(3)]))


def test_halfspace_errors():
    with pytest.raises(Unbounded):
        halfspace_intersection([((1, 0), 1.0), ((0, 1), 1.0)], 2)
    with pytest.raises(Empty):
        halfspace_intersection([((1, 0), -1.0), ((-1, 0), -1.0), ((0, 1), 1), ((0, -1), 1)], 2)
    with pytest.raises(LowerDimensional):
        halfspace_intersection([((1, 0), 0.0), ((-1, 0), 0.0), ((0, 1), 1), ((0, -1), 1)], 2)


def _polar_vertices(normals, offsets):
    """Vertices of {x : n.x <= c} (c > 0) via the polar dual: facets of hull(n / c)."""
    d = convex_hull(np.asarray(normals) / np.asarray(offsets)[:, None])
    if isinstance(d, Polygon):
        v = d.vertices
        out = []
        for a, b in zip(v, np.roll(v, -1, axis=0)):
            out.append(np.linalg.solve(np.array([a, b]), np.ones(2)))
        return np.array(out)
    normals_d, offsets_d = d.face_planes()
    return normals_d / offsets_d[:, None]


@pytest.mark.parametrize("dim", [2, 3])
def test_halfspace_matches_polar_duality(dim):
    rng = np.random.default_rng(10 + dim)
    normals = rng.normal(size=(25, dim))
    offsets = rng.uniform(0.5, 2.0, size=25)
    got = halfspace_intersection(list(zip(normals, offsets)), dim)
    assert _rows(got.vertices, 6) == _rows(_polar_vertices(normals, offsets), 6)


def test_halfspace_roundtrip_of_hull_facets():
    rng = np.random.default_rng(12)
    h = convex_hull_3d(rng.normal(size=(40, 3)))
    normals, offsets = h.face_planes()
    back = halfspace_intersection(list(zip(normals, offsets)), 3)
    assert np.allclose(back.vertices, h.vertices, atol=1e-9)


# -- Hausdorff -----------------------------------------------------------------


def test_hausdorff_trivial():
    a = np.array(UNIT_SQUARE, dtype=float)
    assert hausdorff_distance(a, a) == 0
    assert hausdorff_distance([(0, 0)], [(3, 4)]) == pytest.approx(5.0)
    with pytest.raises(EmptySet):
        hausdorff_distance(np.zeros((0, 2)), a)


def test_hausdorff_scaled_square_boundary():
    sq = np.array(UNIT_SQUARE, dtype=float) - 0.5
    a, b = sample_boundary(sq, 1e-3), sample_boundary(1.1 * sq, 1e-3)
    expected = 0.05 * math.sqrt(2)
    assert hausdorff_distance(a, b) == pytest.approx(expected, abs=1e-3)
    assert convex_hausdorff(sq, 1.1 * sq) == pytest.approx(expected, abs=1e-12)


def test_convex_hausdorff_matches_dense_sampling():
    rng = np.random.default_rng(21)
    for _ in range(5):
        a = convex_hull_2d(rng.normal(size=(12, 2))).vertices
        b = convex_hull_2d(rng.normal(size=(12, 2))).vertices
        sampled = hausdorff_distance(sample_boundary(a, 2e-4), sample_boundary(b, 2e-4))
        assert convex_hausdorff(a, b) == pytest.approx(sampled, abs=1e-3)


def test_convex_hausdorff_3d_cubes():
    cube = np.array(list(itertools.product((-1, 1), repeat=3)), dtype=float)
    assert convex_hausdorff(cube, 2 * cube) == pytest.approx(math.sqrt(3))
    oct_ = np.vstack([np.eye(3), -np.eye(3)])
    # farthest cube corner from the octahedron: (1,1,1) to the face x+y+z = 1
    assert convex_hausdorff(cube, oct_) == pytest.approx(2 / math.sqrt(3))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_hausdorff_symmetric_and_triangle(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rng.normal(size=(15, 2)) for _ in range(3))
    assert hausdorff_distance(a, b) == hausdorff_distance(b, a)
    assert directed_hausdorff(a, b) <= hausdorff_distance(a, b)
    assert hausdorff_distance(a, c) <= hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-12
    assert convex_hausdorff(a, c) <= convex_hausdorff(a, b) + convex_hausdorff(b, c) + 1e-9


# -- polygons ------------------------------------------------------------------


def _fan_area(v):
    v = np.asarray(v, dtype=float)
    total = 0.0
    for k in range(1, len(v) - 1):
        e1, e2 = v[k] - v[0], v[k + 1] - v[0]
        total += 0.5 * (e1[0] * e2[1] - e1[1] * e2[0])
    return total


def _star_polygon(rng, n=12):
    ang = np.sort(rng.uniform(0, 2 * np.pi, n))
    r = rng.uniform(0.5, 2.0, n)
    return np.c_[r * np.cos(ang), r * np.sin(ang)]


def test_polygon_area_unit_square():
    assert polygon_area(Polygon(UNIT_SQUARE)) == 1.0


def test_polygon_area_matches_fan():
    rng = np.random.default_rng(2)
    for _ in range(20):
        v = _star_polygon(rng)
        assert polygon_area(Polygon(v)) == pytest.approx(_fan_area(v), rel=1e-12)


def test_polygon_validation():
    with pytest.raises(ValueError):
        Polygon(UNIT_SQUARE[::-1])
    with pytest.raises(ValueError):
        Polygon([(0, 0), (1, 1), (1, 0), (0, 1)])
    with pytest.raises(ValueError):
        Polygon([(0, 0), (1, 0)])


def test_canonical_rotation():
    p = Polygon([(1, 1), (0, 1), (0, 0), (1, 0)])
    assert np.allclose(p.canonical().vertices[0], (0, 0))
    assert p.equals(Polygon(UNIT_SQUARE))


def test_centrosymmetry_and_simplify():
    hexagon = np.array([(math.cos(a), math.sin(a)) for a in np.arange(6) * math.pi / 3])
    assert is_centrosymmetric(hexagon)
    assert not is_centrosymmetric(hexagon[:3])
    bumpy = convex_hull_2d(np.vstack([np.array(UNIT_SQUARE), [(0.5, -1e-4)]]))
    assert len(simplify_convex(bumpy, 1e-3)) == 4


def test_polytope_edges():
    p = ConvexPolytope3(np.vstack([np.eye(3), np.zeros(3)]), [[0, 1, 2], [0, 3, 1], [1, 3, 2], [2, 3, 0]])
    assert p.n_edges == 6 and p.euler_characteristic() == 2
