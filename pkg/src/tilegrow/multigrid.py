"""de Bruijn multigrids and their dual (grid) tilings.

An N-grid is given by unit vectors ``g_i`` and phases ``gamma_i``; family ``i``
consists of the hyperplanes ``<x, g_i> - gamma_i = m``, ``m`` integer.  The
index function ``K(x) = sum_i ceil(<x, g_i> - gamma_i) g_i`` is constant on the
cells of the arrangement; each intersection of ``d`` hyperplanes becomes one
dual tile (a rhombus in 2D, a parallelepiped in 3D) whose corners are the
``K`` values of the cells around it.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec, IrregularGrid, OnGridHyperplane, ParallelGridVectors
from .geom import EPS_GEOM
from .tiling import EDGE_SHARE, Patch, Tile, _csr_from_pairs, build_adjacency, parallelepiped_tile

REGULARITY_MARGIN = 10 * EPS_GEOM


@dataclass
class GridSpec:
    vectors: np.ndarray
    phases: np.ndarray
    name: str = ""

    def __post_init__(self):
        self.vectors = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        self.phases = np.asarray(self.phases, dtype=float).reshape(-1)
        if len(self.phases) != len(self.vectors):
            raise ValueError("need one phase per grid vector")

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    @property
    def N(self) -> int:
        return self.vectors.shape[0]

    def validate(self):
        if self.d not in (2, 3):
            raise InvalidSpec("InvalidSpec: grid dimension must be 2 or 3")
        if self.phases.shape != (self.N,):
            raise InvalidSpec("InvalidSpec: need one phase per grid vector")
        norms = np.linalg.norm(self.vectors, axis=1)
        if np.any(np.abs(norms - 1) > EPS_GEOM):
            raise InvalidSpec("InvalidSpec: grid vectors must be unit vectors")
        # N = d is allowed: it gives the lattice generated by the g_i
        if self.N < self.d or np.linalg.matrix_rank(self.vectors, tol=EPS_GEOM) < self.d:
            raise InvalidSpec("InvalidSpec: grid vectors must span the space")
        for i, j in itertools.combinations(range(self.N), 2):
            if 1 - abs(self.vectors[i] @ self.vectors[j]) <= EPS_GEOM:
                raise ParallelGridVectors(f"ParallelGridVectors: g_{i} and g_{j} are parallel")

    def gram(self) -> np.ndarray:
        """``sum_i g_i g_i^T``: the linear part of ``K`` on large scales."""
        return self.vectors.T @ self.vectors

    def rotated(self, rot) -> "GridSpec":
        return GridSpec(self.vectors @ np.asarray(rot, dtype=float).T, self.phases.copy(), self.name)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "grid",
            "name": self.name,
            "d": self.d,
            "vectors": self.vectors.tolist(),
            "phases": self.phases.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GridSpec":
        spec = cls(data["vectors"], data["phases"], data.get("name", ""))
        if "d" in data and int(data["d"]) != spec.d:
            raise ValueError("declared d does not match the vectors")
        return spec

    @classmethod
    def from_json(cls, path) -> "GridSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


# -- presets -------------------------------------------------------------------


def star_vectors(n: int, offset: float = 0.0) -> np.ndarray:
    a = offset + 2 * np.pi * np.arange(n) / n
    return np.stack([np.cos(a), np.sin(a)], axis=1)


def penrose(phases=None) -> GridSpec:
    """Pentagrid; the default phases sum to 1, de Bruijn's Penrose condition."""
    return GridSpec(star_vectors(5), [0.2] * 5 if phases is None else phases, "penrose")


def hexagrid(phases=(0.1, 0.2, 0.3)) -> GridSpec:
    # phases summing to an integer would put triple points on the grid
    return GridSpec(star_vectors(3), phases, "hexagrid")


def ortho2(phases=(0.5, 0.5)) -> GridSpec:
    return GridSpec(np.eye(2), phases, "ortho2")


def ortho3(phases=(0.5, 0.5, 0.5)) -> GridSpec:
    return GridSpec(np.eye(3), phases, "ortho3")


def icosahedral_vectors() -> np.ndarray:
    """The six 5-fold axes of the icosahedron, normalised."""
    tau = (1 + math.sqrt(5)) / 2
    v = np.array([(0, 1, tau), (0, -1, tau), (1, tau, 0), (-1, tau, 0), (tau, 0, 1), (tau, 0, -1)], dtype=float)
    return v / np.linalg.norm(v, axis=1)[:, None]


def ammann3d(phases=(0.11, 0.23, 0.37, 0.41, 0.53, 0.67)) -> GridSpec:
    return GridSpec(icosahedral_vectors(), phases, "ammann3d")


def random_grid(n: int, d: int, rng: np.random.Generator, radius: float = 6.0, max_tries: int = 100) -> GridSpec:
    """Random unit vectors and phases, redrawn until the grid is regular."""
    for _ in range(max_tries):
        v = rng.normal(size=(n, d))
        v /= np.linalg.norm(v, axis=1)[:, None]
        spec = GridSpec(v, rng.uniform(0, 1, size=n), f"random{d}d-{n}")
        try:
            spec.validate()
        except ParallelGridVectors:
            continue
        if d == 3 and any(
            abs(np.linalg.det(v[list(t)])) < 1e-6 for t in itertools.combinations(range(n), 3)
        ):
            continue
        if is_regular(spec, radius):
            return spec
    raise RuntimeError("could not draw a regular grid")


PRESETS = {"penrose": penrose, "hexagrid": hexagrid, "ortho2": ortho2, "ortho3": ortho3, "ammann3d": ammann3d}


# -- index functions -----------------------------------------------------------


def K_index(spec: GridSpec, i: int, x, eps=EPS_GEOM) -> int:
    """``ceil(<x, g_i> - gamma_i)``; undefined on the hyperplanes of family ``i``."""
    s = float(np.dot(np.asarray(x, dtype=float), spec.vectors[i]) - spec.phases[i])
    if abs(s - round(s)) <= eps:
        raise OnGridHyperplane(f"point lies on a hyperplane of family {i}")
    return math.ceil(s)


def K_indices(spec: GridSpec, points, eps=EPS_GEOM) -> np.ndarray:
    """Vectorised ``K_i`` for all families: integer array of shape ``(n, N)``."""
    x = np.atleast_2d(np.asarray(points, dtype=float))
    s = x @ spec.vectors.T - spec.phases
    if np.any(np.abs(s - np.round(s)) <= eps):
        raise OnGridHyperplane("a sample point lies on a grid hyperplane")
    return np.ceil(s).astype(np.int64)


def K_point(spec: GridSpec, x, eps=EPS_GEOM) -> np.ndarray:
    """``K(x) = sum_i K_i(x) g_i``."""
    k = K_indices(spec, x, eps)
    out = k @ spec.vectors
    return out[0] if np.ndim(x) == 1 else out


# -- intersections -------------------------------------------------------------


@dataclass
class Intersections:
    """Intersection points of ``d`` hyperplanes from distinct families.

    ``families`` and ``levels`` are ``(n, d)`` integer arrays, ``points`` the
    locations.  Rows are sorted by (families, levels).
    """

    families: np.ndarray
    levels: np.ndarray
    points: np.ndarray

    def __len__(self):
        return len(self.points)


def intersections(spec: GridSpec, radius: float) -> Intersections:
    d = spec.d
    fams, levs, pts = [], [], []
    for combo in itertools.combinations(range(spec.N), d):
        m = spec.vectors[list(combo)]
        if abs(np.linalg.det(m)) < 1e-12:
            continue
        minv = np.linalg.inv(m)
        gam = spec.phases[list(combo)]
        ranges = [np.arange(math.ceil(-radius - g), math.floor(radius - g) + 1) for g in gam]
        grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, d)
        x = (grid + gam) @ minv.T
        keep = np.linalg.norm(x, axis=1) <= radius
        if not keep.any():
            continue
        fams.append(np.tile(combo, (int(keep.sum()), 1)))
        levs.append(grid[keep])
        pts.append(x[keep])
    if not pts:
        return Intersections(np.zeros((0, d), int), np.zeros((0, d), int), np.zeros((0, d)))
    fams, levs, pts = np.vstack(fams), np.vstack(levs).astype(np.int64), np.vstack(pts)
    order = np.lexsort(tuple(levs.T[::-1]) + tuple(fams.T[::-1]))
    return Intersections(fams[order], levs[order], pts[order])


def _other_family_gaps(spec, inter):
    """Distance from each intersection to the nearest hyperplane of an uninvolved family."""
    s = inter.points @ spec.vectors.T - spec.phases
    gap = np.abs(s - np.round(s))
    rows = np.arange(len(inter))[:, None]
    gap[rows, inter.families] = np.inf
    return gap.min(axis=1) if spec.N > spec.d else np.full(len(inter), np.inf)


def is_regular(spec: GridSpec, region_radius: float) -> bool:
    """No point within the region lies on more than ``d`` grid hyperplanes."""
    inter = intersections(spec, region_radius)
    if len(inter) == 0:
        return True
    return bool(np.all(_other_family_gaps(spec, inter) > REGULARITY_MARGIN))


# -- dual tiling ---------------------------------------------------------------


def _shape_label(spec, combo):
    g = spec.vectors[list(combo)]
    if spec.d == 2:
        ang = math.degrees(math.acos(min(1.0, abs(float(g[0] @ g[1])))))
        return f"rhomb-{ang:.0f}"
    vol = abs(float(np.linalg.det(g)))
    return f"cell-{vol:.4f}"


def dual_tiling(spec: GridSpec, region_radius: float, validate: bool = False) -> Patch:
    """Dual tiling of the grid restricted to intersections within ``region_radius``.

    Each corner of a dual tile is ``K`` evaluated at a sample point in one of
    the ``2^d`` cells around the intersection.  Tile ``meta`` holds the
    families, levels and location of the intersection.
    """
    spec.validate()
    inter = intersections(spec, region_radius)
    if len(inter) == 0:
        raise ValueError("region contains no grid intersections")
    gaps = _other_family_gaps(spec, inter)
    if np.any(gaps <= REGULARITY_MARGIN):
        raise IrregularGrid("IrregularGrid: more than d hyperplanes meet inside the region")

    d = spec.d
    signs = np.array(list(itertools.product((-1, 1), repeat=d)), dtype=float)  # (2^d, d)
    tiles = []
    for combo in sorted({tuple(f) for f in inter.families.tolist()}):
        rows = np.nonzero(np.all(inter.families == combo, axis=1))[0]
        g = spec.vectors[list(combo)]
        minv = np.linalg.inv(g)
        # step small enough not to cross an uninvolved hyperplane
        step = np.minimum(1e-4, 0.1 * gaps[rows]) / max(1.0, np.abs(minv).sum(axis=0).max())
        x = inter.points[rows]
        # sample y with <y, g_c> - gamma_c = level_c + sign * step for each involved family c
        offs = (signs[None, :, :] * step[:, None, None]) @ minv.T
        samples = x[:, None, :] + offs
        kvals = K_indices(spec, samples.reshape(-1, d), eps=0.0).reshape(len(rows), len(signs), spec.N)
        corners = kvals @ spec.vectors  # (n, 2^d, d)
        base = corners[:, 0, :]
        label = _shape_label(spec, combo)
        if d == 2:
            quad = corners[:, [0, 2, 3, 1], :]  # (-,-), (+,-), (+,+), (-,+)
            if np.linalg.det(g) < 0:
                quad = quad[:, ::-1, :]
            for r, q, b in zip(rows, quad, base):
                tiles.append(
                    Tile(
                        len(tiles),
                        q,
                        label,
                        centroid=b + g.sum(axis=0) / 2,
                        meta={"families": combo, "levels": tuple(inter.levels[r].tolist()), "point": inter.points[r]},
                    )
                )
        else:
            for r, b in zip(rows, base):
                tiles.append(
                    parallelepiped_tile(
                        len(tiles),
                        b,
                        g,
                        label,
                        meta={"families": combo, "levels": tuple(inter.levels[r].tolist()), "point": inter.points[r]},
                    )
                )

    center = spec.vectors.T @ (0.5 - spec.phases)
    sigma = float(np.linalg.svd(spec.gram(), compute_uv=False).min())
    diam = max(t.diameter for t in tiles)
    complete = sigma * region_radius - spec.N / 2 - diam
    guard = complete - 2 * diam
    return build_adjacency(tiles, EDGE_SHARE, guard_radius=guard, center=center, validate=validate)


def combinatorial_adjacency(spec: GridSpec, patch: Patch):
    """Neighbour pairs from the arrangement: consecutive intersections along a grid line.

    Returns ``(indptr, indices)`` in the same CSR layout as :class:`Patch`.
    """
    d = spec.d
    lines = {}
    for t in patch.tiles:
        fam, lev = t.meta["families"], t.meta["levels"]
        for drop in range(d):
            key = tuple(f for k, f in enumerate(fam) if k != drop), tuple(l for k, l in enumerate(lev) if k != drop)
            lines.setdefault(key, []).append(t.id)
    pairs = []
    for (fam, _), ids in lines.items():
        if len(ids) < 2:
            continue
        if d == 2:
            g = spec.vectors[fam[0]]
            direction = np.array([-g[1], g[0]])
        else:
            direction = np.cross(spec.vectors[fam[0]], spec.vectors[fam[1]])
        pos = np.array([patch.tiles[i].meta["point"] @ direction for i in ids])
        order = np.argsort(pos)
        ids = np.asarray(ids)[order]
        pairs.extend(zip(ids[:-1], ids[1:]))
    return _csr_from_pairs(len(patch.tiles), pairs)


# -- Appendix-A style line counting --------------------------------------------


def pair_spacing(g_i, g_j) -> float:
    """Distance between consecutive crossings of family ``j`` along a line of family ``i``."""
    c = min(1.0, abs(float(np.dot(g_i, g_j))))
    return 1.0 / math.sin(math.acos(c))


def _line_frame(spec, i, level):
    g = spec.vectors[i]
    p0 = (spec.phases[i] + level) * g
    u = np.array([-g[1], g[0]])
    return p0, u


def line_crossings(spec: GridSpec, i: int, j: int, length: float, level: int = 0, start: float = 0.0) -> np.ndarray:
    """Parameters ``t`` in ``[start, start + length)`` where family ``j`` crosses line ``(i, level)``."""
    p0, u = _line_frame(spec, i, level)
    rate = float(u @ spec.vectors[j])
    s0 = float(p0 @ spec.vectors[j]) - spec.phases[j]
    a, b = s0 + rate * start, s0 + rate * (start + length)
    lo, hi = min(a, b), max(a, b)
    ns = np.arange(math.ceil(lo), math.floor(hi) + 1)
    t = (ns - s0) / rate
    return np.sort(t[(t >= start) & (t < start + length)])


def line_count_statistic(spec: GridSpec, i: int, j: int, length: float, level: int = 0, start: float = 0.0):
    """``(N_ij, |N_ij - l / delta_ij|)`` for a segment on a line of family ``i``."""
    if spec.d != 2:
        raise ValueError("line counting is defined for 2D grids")
    if i == j:
        raise ValueError("need two distinct families")
    n = len(line_crossings(spec, i, j, length, level, start))
    delta = pair_spacing(spec.vectors[i], spec.vectors[j])
    return n, abs(n - length / delta)


def line_multigrid_points(spec: GridSpec, i: int, length: float, level: int = 0, start: float = 0.0, eps=1e-9) -> int:
    """Number of distinct multigrid points on the segment (``N_i(l)``)."""
    ts = np.concatenate([line_crossings(spec, i, j, length, level, start) for j in range(spec.N) if j != i])
    if len(ts) == 0:
        return 0
    ts = np.sort(ts)
    return int(1 + np.sum(np.diff(ts) > eps))
