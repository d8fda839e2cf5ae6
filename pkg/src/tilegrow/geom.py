"""Geometric primitives: polygons, convex hulls, halfspace intersection,
Hausdorff distances.

Everything works on float64 numpy arrays.  Points are ``(n, d)`` arrays with
``d`` in {2, 3}; tolerances default to :data:`EPS_GEOM` for point coincidence
and :data:`EPS_FORM` for comparing growth forms.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError, cKDTree

from .errors import DegenerateHull, Empty, EmptySet, LowerDimensional, Unbounded

EPS_GEOM = 1e-9
EPS_FORM = 1e-6


@dataclass(frozen=True)
class Tolerance:
    eps_geom: float = EPS_GEOM
    eps_form: float = EPS_FORM

    def __post_init__(self):
        if not 0 < self.eps_geom < self.eps_form:
            raise ValueError("need 0 < eps_geom < eps_form")


def as_points(points, dim=None) -> np.ndarray:
    """Coerce ``points`` to a finite float array of shape ``(n, d)``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.ndim != 2 or (dim is not None and pts.shape[1] != dim):
        raise ValueError(f"expected points of dimension {dim}, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    return pts


def dedupe(points, eps=EPS_GEOM) -> np.ndarray:
    """Drop points coinciding within ``eps``, keeping first occurrences in order."""
    pts = as_points(points)
    if len(pts) == 0:
        return pts
    keys = np.round(pts / eps).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    return pts[np.sort(first)]


def _lex_key(pts, eps):
    return np.round(pts / eps).astype(np.int64)


def signed_area(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _segments_cross(p1, p2, q1, q2, eps):
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
        (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    )


class Polygon:
    """A simple polygon with counterclockwise vertices.

    Validation checks vertex count, orientation and (for small polygons)
    simplicity.  Pass ``validate=False`` only for vertex arrays produced by
    trusted generators.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices, validate: bool = True):
        v = as_points(vertices, 2)
        if validate:
            if len(v) < 3:
                raise ValueError("a polygon needs at least 3 vertices")
            area = signed_area(v)
            if area <= 0:
                raise ValueError("polygon vertices must be counterclockwise with positive area")
            if len(v) <= 64 and not self._is_simple(v):
                raise ValueError("polygon is self-intersecting")
        self.vertices = v

    @staticmethod
    def _is_simple(v) -> bool:
        n = len(v)
        for a in range(n):
            for b in range(a + 2, n):
                if a == 0 and b == n - 1:
                    continue
                if _segments_cross(v[a], v[(a + 1) % n], v[b], v[(b + 1) % n], 1e-12):
                    return False
        return True

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"Polygon({self.vertices.round(6).tolist()})"

    @property
    def area(self) -> float:
        return polygon_area(self)

    @property
    def centroid(self) -> np.ndarray:
        return polygon_centroid(self.vertices)

    def edges(self) -> np.ndarray:
        """Edge segments as an ``(n, 2, 2)`` array."""
        return np.stack([self.vertices, np.roll(self.vertices, -1, axis=0)], axis=1)

    def canonical(self, eps=EPS_GEOM) -> "Polygon":
        """Rotate the vertex list so the lexicographically smallest vertex is first."""
        keys = _lex_key(self.vertices, eps)
        start = int(np.lexsort((keys[:, 1], keys[:, 0]))[0])
        return Polygon(np.roll(self.vertices, -start, axis=0), validate=False)

    def translated(self, offset) -> "Polygon":
        return Polygon(self.vertices + np.asarray(offset, dtype=float), validate=False)

    def scaled(self, s: float) -> "Polygon":
        return Polygon(self.vertices * s, validate=False)

    def equals(self, other: "Polygon", eps=EPS_GEOM) -> bool:
        a, b = self.canonical(eps).vertices, other.canonical(eps).vertices
        return a.shape == b.shape and bool(np.all(np.abs(a - b) <= eps))


@dataclass
class ConvexPolytope3:
    """A convex polyhedron: extreme vertices plus faces as vertex-index cycles.

    Faces are oriented counterclockwise when seen from outside.
    """

    vertices: np.ndarray
    faces: list = field(default_factory=list)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def edges(self) -> set:
        out = set()
        for f in self.faces:
            for a, b in zip(f, f[1:] + f[:1]):
                out.add((min(a, b), max(a, b)))
        return out

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def face_planes(self):
        """Outward unit normals and offsets, one row per face."""
        normals, offsets = [], []
        for f in self.faces:
            p = self.vertices[list(f)]
            n = np.zeros(3)
            # Newell's method; robust for planar polygons
            for a, b in zip(p, np.roll(p, -1, axis=0)):
                n += np.cross(a, b)
            n /= np.linalg.norm(n)
            normals.append(n)
            offsets.append(float(n @ p.mean(axis=0)))
        return np.array(normals), np.array(offsets)


def polygon_area(p) -> float:
    """Shoelace area of a polygon (positive for valid counterclockwise input)."""
    verts = p.vertices if isinstance(p, Polygon) else p
    return abs(signed_area(verts))


def polygon_centroid(vertices) -> np.ndarray:
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = cross.sum() / 2
    if abs(a) < 1e-300:
        return v.mean(axis=0)
    return np.array([((x + xn) * cross).sum(), ((y + yn) * cross).sum()]) / (6 * a)


def convex_hull_2d(points, eps=EPS_GEOM) -> Polygon:
    """Counterclockwise convex hull (Andrew's monotone chain).

    Points on hull edges are dropped, so every output vertex is extreme.  The
    result starts at the lexicographically smallest vertex.
    """
    pts = dedupe(as_points(points, 2), eps)
    if len(pts) < 3:
        raise DegenerateHull("need at least 3 distinct points")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def turn_ok(o, a, b):
        cross = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
        scale = np.hypot(a[0] - o[0], a[1] - o[1]) * np.hypot(b[0] - o[0], b[1] - o[1])
        return cross > eps * max(scale, eps)

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and not turn_ok(out[-2], out[-1], p):
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateHull("points are collinear")
    return Polygon(np.array(hull), validate=False).canonical(eps)


def _order_face(vertices, idx, normal):
    p = vertices[idx]
    c = p.mean(axis=0)
    u = p[0] - c
    u /= np.linalg.norm(u)
    w = np.cross(normal, u)
    ang = np.arctan2((p - c) @ w, (p - c) @ u)
    ordered = [idx[k] for k in np.argsort(ang)]
    start = ordered.index(min(ordered))
    return tuple(ordered[start:] + ordered[:start])


def convex_hull_3d(points, eps=EPS_GEOM) -> ConvexPolytope3:
    """Convex hull in 3D with coplanar triangles merged into polygonal faces.

    Vertices come out in lexicographic order, faces sorted by index tuple.
    """
    pts = dedupe(as_points(points, 3), eps)
    if len(pts) < 4:
        raise DegenerateHull("need at least 4 distinct points")
    centered = pts - pts.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[-1] <= eps * max(sv[0], 1.0):
        raise DegenerateHull("points are coplanar")
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise DegenerateHull(str(exc)) from exc

    verts = pts[hull.vertices]
    keys = _lex_key(verts, eps)
    order = np.lexsort((keys[:, 2], keys[:, 1], keys[:, 0]))
    verts = verts[order]
    remap = {int(hull.vertices[o]): k for k, o in enumerate(order)}

    # merge triangles sharing a supporting plane
    planes = []
    groups = []
    tol = max(1e-7, 1e3 * eps)
    for simplex, eq in zip(hull.simplices, hull.equations):
        for g, (n, off) in enumerate(planes):
            if np.all(np.abs(n - eq[:3]) < tol) and abs(off - eq[3]) < tol:
                groups[g].update(int(s) for s in simplex)
                break
        else:
            planes.append((eq[:3], eq[3]))
            groups.append({int(s) for s in simplex})

    faces = []
    for (n, _), g in zip(planes, groups):
        idx = sorted(remap[s] for s in g if s in remap)
        faces.append(_order_face(verts, idx, n))
    faces.sort()
    return ConvexPolytope3(vertices=verts, faces=faces)


def convex_hull(points, eps=EPS_GEOM):
    pts = as_points(points)
    if pts.shape[1] == 2:
        return convex_hull_2d(pts, eps)
    if pts.shape[1] == 3:
        return convex_hull_3d(pts, eps)
    raise ValueError("only 2D and 3D hulls are supported")


def hull_vertices(shape) -> np.ndarray:
    return shape.vertices


def halfspace_intersection(halfspaces, dim: int, eps=EPS_GEOM):
    """Vertex representation of ``{x : <n_k, x> <= c_k for all k}``.

    ``halfspaces`` is a sequence of ``(normal, offset)`` pairs.  Returns a
    :class:`Polygon` for ``dim == 2`` and a :class:`ConvexPolytope3` for
    ``dim == 3``.
    """
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    normals = np.array([np.asarray(n, dtype=float) for n, _ in halfspaces])
    offsets = np.array([float(c) for _, c in halfspaces])
    if normals.ndim != 2 or normals.shape[1] != dim:
        raise ValueError(f"normals must have dimension {dim}")
    norms = np.linalg.norm(normals, axis=1)
    trivial = norms <= eps
    if np.any(offsets[trivial] < -eps):
        raise Empty("a halfspace with zero normal and negative offset is empty")
    normals, offsets, norms = normals[~trivial], offsets[~trivial], norms[~trivial]
    if len(normals) == 0:
        raise Unbounded("no constraining halfspaces")
    normals = normals / norms[:, None]
    offsets = offsets / norms

    # Chebyshev centre: max r s.t. <n, x> + r <= c
    cost = np.zeros(dim + 1)
    cost[-1] = -1.0
    a_ub = np.hstack([normals, np.ones((len(normals), 1))])
    bounds = [(None, None)] * dim + [(0, None)]
    res = linprog(cost, A_ub=a_ub, b_ub=offsets, bounds=bounds, method="highs")
    if res.status == 2:
        raise Empty("halfspaces have empty intersection")
    if res.status == 3:
        raise Unbounded("intersection contains arbitrarily large balls")
    if res.status != 0:
        raise LowerDimensional(f"linear program failed: {res.message}")
    center, radius = res.x[:dim], res.x[-1]
    if radius <= eps:
        raise LowerDimensional("intersection has empty interior")

    for k in range(dim):
        for sign in (1.0, -1.0):
            c = np.zeros(dim)
            c[k] = sign
            probe = linprog(c, A_ub=normals, b_ub=offsets, bounds=[(None, None)] * dim, method="highs")
            if probe.status == 3:
                raise Unbounded("intersection is unbounded")

    hs = HalfspaceIntersection(np.hstack([normals, -offsets[:, None]]), center)
    pts = dedupe(hs.intersections, max(eps, 1e-10))
    return convex_hull(pts, eps)


# -- distances ---------------------------------------------------------------


def directed_hausdorff(a, b) -> float:
    """sup over points of ``a`` of the distance to the nearest point of ``b``."""
    a, b = as_points(a), as_points(b)
    if len(a) == 0 or len(b) == 0:
        raise EmptySet("Hausdorff distance needs nonempty sets")
    d, _ = cKDTree(b).query(a)
    return float(d.max())


def hausdorff_distance(a, b) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def sample_boundary(vertices, step: float) -> np.ndarray:
    """Points along a closed polyline, spaced at most ``step`` apart."""
    v = as_points(vertices, 2)
    out = []
    for a, b in zip(v, np.roll(v, -1, axis=0)):
        k = max(1, int(np.ceil(np.linalg.norm(b - a) / step)))
        t = np.arange(k)[:, None] / k
        out.append(a + t * (b - a))
    return np.vstack(out)


def _point_segment_distance(p, a, b):
    """Distances from points ``p`` (m, d) to segments ``a``-``b`` (k, d): (m, k)."""
    ab = b - a
    denom = np.einsum("kd,kd->k", ab, ab)
    denom = np.where(denom == 0, 1.0, denom)
    ap = p[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("mkd,kd->mk", ap, ab) / denom, 0.0, 1.0)
    proj = a[None] + t[..., None] * ab[None]
    return np.linalg.norm(p[:, None, :] - proj, axis=2)


def distance_to_convex(points, shape, eps=EPS_GEOM) -> np.ndarray:
    """Euclidean distance from each point to a filled convex polygon/polytope."""
    p = as_points(points)
    if isinstance(shape, Polygon):
        v = shape.vertices
        a, b = v, np.roll(v, -1, axis=0)
        e = b - a
        cross = e[None, :, 0] * (p[:, None, 1] - a[None, :, 1]) - e[None, :, 1] * (p[:, None, 0] - a[None, :, 0])
        inside = np.all(cross >= -eps * np.linalg.norm(e, axis=1)[None], axis=1)
        d = _point_segment_distance(p, a, b).min(axis=1)
        return np.where(inside, 0.0, d)

    normals, offsets = shape.face_planes()
    signed = p @ normals.T - offsets[None]
    inside = np.all(signed <= eps, axis=1)
    v = shape.vertices
    edges = np.array(sorted(shape.edges))
    d = _point_segment_distance(p, v[edges[:, 0]], v[edges[:, 1]]).min(axis=1)
    for fi, face in enumerate(shape.faces):
        fv = v[list(face)]
        proj = p - signed[:, fi : fi + 1] * normals[fi]
        ok = np.ones(len(p), dtype=bool)
        for a, b in zip(fv, np.roll(fv, -1, axis=0)):
            ok &= (np.cross(b - a, proj - a) @ normals[fi]) >= -eps
        d = np.where(ok, np.minimum(d, np.abs(signed[:, fi])), d)
    return np.where(inside, 0.0, d)


def convex_hausdorff(a, b, eps=EPS_GEOM) -> float:
    """Exact Hausdorff distance between the convex hulls of two vertex sets.

    The distance to a convex body is a convex function, so each directed
    distance is attained at a vertex.  For convex bodies this equals the
    Hausdorff distance between their boundaries.
    """
    a, b = as_points(a), as_points(b)
    if len(a) == 0 or len(b) == 0:
        raise EmptySet("Hausdorff distance needs nonempty sets")
    ha, hb = convex_hull(a, eps), convex_hull(b, eps)
    return float(
        max(
            distance_to_convex(ha.vertices, hb, eps).max(),
            distance_to_convex(hb.vertices, ha, eps).max(),
        )
    )


def is_centrosymmetric(vertices, eps=EPS_FORM) -> bool:
    v = as_points(vertices)
    if len(v) == 0:
        return False
    d, _ = cKDTree(v).query(-v)
    return bool(d.max() <= eps)


def contains_convex(outer, inner_points, eps=EPS_FORM) -> bool:
    """Whether every point of ``inner_points`` lies in the convex shape ``outer``."""
    return bool(distance_to_convex(inner_points, outer, eps=eps).max() <= eps)


def simplify_convex(poly: Polygon, tol: float) -> Polygon:
    """Greedily drop hull vertices lying within ``tol`` of the chord of their neighbours."""
    v = list(poly.vertices)
    while len(v) > 3:
        n = len(v)
        best, best_d = None, tol
        for k in range(n):
            a, p, b = v[k - 1], v[k], v[(k + 1) % n]
            d = _point_segment_distance(p[None], a[None], b[None])[0, 0]
            if d < best_d:
                best, best_d = k, d
        if best is None:
            break
        del v[best]
    return Polygon(np.array(v), validate=False)
