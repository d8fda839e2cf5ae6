"""Finite tiling patches, neighbour graphs, coordination shells.

A :class:`Patch` stores tiles together with a symmetric neighbour graph in
CSR form.  Adjacency is built geometrically:

* ``EdgeShare`` -- two 2D tiles are neighbours when boundary segments overlap
  collinearly over a length of at least ``min_shared_measure`` (3D: coplanar
  facets overlapping with at least that area);
* ``HeeschShare`` -- any boundary contact counts, single points included.

A patch generated from an infinite tiling knows the radius (``guard_radius``,
around ``center``) inside which every tile has its complete neighbourhood.
:func:`shells` refuses to expand a shell that leaves that disc.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import shapely

from .errors import EmptySeed, GuardBandExceeded, IndexOutOfRange, OverlappingTiles
from .geom import EPS_GEOM, polygon_centroid, signed_area

EDGE = "edge"
HEESCH = "heesch"

_LINE_TOL = 1e-7
_CONTACT_TOL = 1e-7


@dataclass(frozen=True)
class NeighborRule:
    kind: str = EDGE
    min_shared_measure: float = 1e-6

    def __post_init__(self):
        if self.kind not in (EDGE, HEESCH):
            raise ValueError(f"unknown neighbour rule {self.kind!r}")
        if self.kind == EDGE and self.min_shared_measure <= 0:
            raise ValueError("EdgeShare needs a positive min_shared_measure")


EDGE_SHARE = NeighborRule(EDGE, 1e-6)
HEESCH_SHARE = NeighborRule(HEESCH, 0.0)


def rule_from_name(name: str) -> NeighborRule:
    key = name.lower().replace("_", "").replace("-", "")
    if key in ("edge", "edgeshare"):
        return EDGE_SHARE
    if key in ("heesch", "heeschshare"):
        return HEESCH_SHARE
    raise ValueError(f"unknown neighbour rule {name!r}")


@dataclass
class Tile:
    """One tile.

    2D tiles carry a counterclockwise polygon in ``vertices``.  3D tiles are
    parallelepipeds: ``frame`` holds the base corner followed by the three edge
    vectors, and ``vertices`` the eight corners.
    """

    id: int
    vertices: np.ndarray
    label: str = ""
    centroid: np.ndarray | None = None
    frame: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.centroid is None:
            if self.frame is not None:
                self.centroid = self.frame[0] + self.frame[1:].sum(axis=0) / 2
            else:
                self.centroid = polygon_centroid(self.vertices)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def measure(self) -> float:
        if self.frame is not None:
            return abs(float(np.linalg.det(self.frame[1:])))
        return abs(signed_area(self.vertices))

    @property
    def diameter(self) -> float:
        v = self.vertices
        return float(np.max(np.linalg.norm(v[:, None] - v[None], axis=2)))


def parallelepiped_tile(tid, origin, edges, label="", meta=None) -> Tile:
    origin = np.asarray(origin, dtype=float)
    edges = np.asarray(edges, dtype=float)
    corners = np.array([origin + np.array(c) @ edges for c in itertools.product((0, 1), repeat=3)])
    return Tile(tid, corners, label, frame=np.vstack([origin, edges]), meta=meta or {})


@dataclass
class Patch:
    """Tiles plus a symmetric, irreflexive neighbour graph (CSR arrays)."""

    tiles: list
    indptr: np.ndarray
    indices: np.ndarray
    rule: NeighborRule = EDGE_SHARE
    guard_radius: float = np.inf
    center: np.ndarray | None = None
    _centroids: np.ndarray | None = field(default=None, repr=False)
    guard_box: np.ndarray | None = None  # optional (2, dim) lower/upper corners

    def __post_init__(self):
        if self.center is None:
            self.center = np.zeros(self.dim)

    def __len__(self):
        return len(self.tiles)

    @property
    def dim(self) -> int:
        return self.tiles[0].dim if self.tiles else 2

    @property
    def centroids(self) -> np.ndarray:
        if self._centroids is None:
            self._centroids = np.array([t.centroid for t in self.tiles], dtype=float)
        return self._centroids

    @property
    def labels(self) -> list:
        return [t.label for t in self.tiles]

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    @property
    def adjacency(self) -> list:
        return [self.neighbors(i).tolist() for i in range(len(self.tiles))]

    def edge_list(self) -> np.ndarray:
        src = np.repeat(np.arange(len(self.tiles)), np.diff(self.indptr))
        keep = src < self.indices
        return np.stack([src[keep], self.indices[keep]], axis=1)

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def max_diameter(self) -> float:
        return max((t.diameter for t in self.tiles), default=0.0)

    def nearest_tile(self, point) -> int:
        d = np.linalg.norm(self.centroids - np.asarray(point, dtype=float), axis=1)
        return int(np.argmin(d))

    @property
    def has_guard(self) -> bool:
        return bool(np.isfinite(self.guard_radius)) or self.guard_box is not None

    def in_guard(self, ids) -> np.ndarray:
        c = self.centroids[np.asarray(ids, dtype=np.int64)]
        ok = np.linalg.norm(c - self.center, axis=1) <= self.guard_radius
        if self.guard_box is not None:
            ok &= np.all((c >= self.guard_box[0]) & (c <= self.guard_box[1]), axis=1)
        return ok


@dataclass
class ShellDecomposition:
    shells: list
    seed_ids: frozenset

    def __len__(self):
        return len(self.shells)

    def index_map(self) -> dict:
        return {t: k for k, shell in enumerate(self.shells) for t in shell}

    def sizes(self) -> list:
        return [len(s) for s in self.shells]


# -- adjacency construction ----------------------------------------------------


def _csr_from_pairs(n, pairs):
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if len(pairs):
        pairs = np.sort(pairs, axis=1)
        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
        pairs = np.unique(pairs, axis=0)
    both = np.vstack([pairs, pairs[:, ::-1]]) if len(pairs) else pairs
    order = np.lexsort((both[:, 1], both[:, 0])) if len(both) else np.array([], dtype=np.int64)
    both = both[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    if len(both):
        np.add.at(indptr, both[:, 0] + 1, 1)
    indptr = np.cumsum(indptr)
    indices = both[:, 1].copy() if len(both) else np.array([], dtype=np.int64)
    return indptr, indices


def candidate_pairs(centroids, reach: float) -> np.ndarray:
    """All pairs ``(i, j)``, ``i < j``, with centroids at most ``reach`` apart."""
    c = np.asarray(centroids, dtype=float)
    n, d = c.shape
    if n < 2:
        return np.zeros((0, 2), dtype=np.int64)
    cells = np.floor((c - c.min(axis=0)) / reach).astype(np.int64) + 1
    dims = cells.max(axis=0) + 2
    mult = np.cumprod(np.concatenate([[1], dims[:-1]]))
    codes = cells @ mult
    order = np.argsort(codes, kind="stable")
    sorted_codes = codes[order]
    out = []
    for off in itertools.product((-1, 0, 1), repeat=d):
        target = codes + np.asarray(off) @ mult
        lo = np.searchsorted(sorted_codes, target, side="left")
        hi = np.searchsorted(sorted_codes, target, side="right")
        cnt = hi - lo
        if cnt.sum() == 0:
            continue
        i = np.repeat(np.arange(n), cnt)
        starts = np.repeat(lo, cnt)
        within = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        j = order[starts + within]
        keep = i < j
        i, j = i[keep], j[keep]
        keep = np.einsum("kd,kd->k", c[i] - c[j], c[i] - c[j]) <= reach * reach
        out.append(np.stack([i[keep], j[keep]], axis=1))
    if not out:
        return np.zeros((0, 2), dtype=np.int64)
    return np.unique(np.vstack(out), axis=0)


def _polygon_edges(tiles):
    counts = np.array([len(t.vertices) for t in tiles])
    verts = np.vstack([t.vertices for t in tiles])
    owner = np.repeat(np.arange(len(tiles)), counts)
    starts = np.cumsum(counts) - counts
    local = np.arange(len(verts)) - np.repeat(starts, counts)
    nxt = np.repeat(starts, counts) + (local + 1) % np.repeat(counts, counts)
    return verts, verts[nxt], owner


def _cluster_sorted(values, tol):
    """Cluster ids for an already sorted 1D array, splitting at gaps > tol."""
    if len(values) == 0:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate([[0], np.cumsum(np.diff(values) > tol)])


def _edge_share_pairs_2d(tiles, min_len):
    a, b, owner = _polygon_edges(tiles)
    d = b - a
    length = np.linalg.norm(d, axis=1)
    ok = length > EPS_GEOM
    a, b, owner, d, length = a[ok], b[ok], owner[ok], d[ok], length[ok]
    u = d / length[:, None]

    # undirected direction as a doubled angle in (-pi, pi]; wrap-around merged below
    phi = np.arctan2(2 * u[:, 0] * u[:, 1], u[:, 0] ** 2 - u[:, 1] ** 2)
    order = np.argsort(phi, kind="stable")
    dir_id = np.empty(len(phi), dtype=np.int64)
    dir_id[order] = _cluster_sorted(phi[order], _LINE_TOL)
    if len(phi) and phi[order[0]] + 2 * np.pi - phi[order[-1]] <= _LINE_TOL:
        dir_id[dir_id == dir_id[order[-1]]] = dir_id[order[0]]

    # one representative direction per cluster
    first = {}
    for k, g in zip(order, dir_id[order]):
        first.setdefault(int(g), int(k))
    rep = np.array([u[first[int(g)]] for g in dir_id])
    perp = np.stack([-rep[:, 1], rep[:, 0]], axis=1)
    offset = np.einsum("ij,ij->i", perp, a)
    ta = np.einsum("ij,ij->i", rep, a)
    tb = np.einsum("ij,ij->i", rep, b)
    t0, t1 = np.minimum(ta, tb), np.maximum(ta, tb)

    order = np.lexsort((offset, dir_id))
    line = np.empty(len(order), dtype=np.int64)
    brk = np.concatenate([[False], (np.diff(dir_id[order]) != 0) | (np.diff(offset[order]) > _LINE_TOL)])
    line[order] = np.cumsum(brk)

    order = np.lexsort((t0, line))
    line, t0, t1, owner = line[order], t0[order], t1[order], owner[order]
    found = []
    s = 1
    while s < len(line):
        same = line[:-s] == line[s:]
        reach = same & (t0[s:] < t1[:-s] - min_len)
        if not reach.any():
            break
        overlap = np.minimum(t1[:-s], t1[s:]) - t0[s:]
        hit = reach & (overlap >= min_len) & (owner[:-s] != owner[s:])
        if hit.any():
            found.append(np.stack([owner[:-s][hit], owner[s:][hit]], axis=1))
        s += 1
    if not found:
        return np.zeros((0, 2), dtype=np.int64)
    return np.vstack(found)


def _padded_vertices(tiles):
    m = max(len(t.vertices) for t in tiles)
    out = np.empty((len(tiles), m, 2))
    for k, t in enumerate(tiles):
        v = t.vertices
        out[k, : len(v)] = v
        out[k, len(v) :] = v[-1]
    return out


def _boundary_gap(pv, i, j):
    """Min distance from vertices of tiles ``i`` to boundary segments of tiles ``j``."""
    vi = pv[i]
    a = pv[j]
    b = np.roll(a, -1, axis=1)
    # repeated padding vertices close the polygon: last real vertex -> first
    ab = b - a
    denom = np.einsum("pkd,pkd->pk", ab, ab)
    denom = np.where(denom == 0, 1.0, denom)
    ap = vi[:, :, None, :] - a[:, None, :, :]
    t = np.clip(np.einsum("pmkd,pkd->pmk", ap, ab) / denom[:, None, :], 0, 1)
    proj = a[:, None, :, :] + t[..., None] * ab[:, None, :, :]
    dist = np.linalg.norm(vi[:, :, None, :] - proj, axis=3)
    return dist.min(axis=(1, 2))


def _heesch_pairs_2d(tiles, centroids):
    reach = 2 * max(t.diameter for t in tiles)
    cand = candidate_pairs(centroids, reach)
    if len(cand) == 0:
        return cand
    pv = _padded_vertices(tiles)
    hits = []
    for chunk in np.array_split(cand, max(1, len(cand) // 20000)):
        i, j = chunk[:, 0], chunk[:, 1]
        gap = np.minimum(_boundary_gap(pv, i, j), _boundary_gap(pv, j, i))
        hits.append(chunk[gap <= _CONTACT_TOL])
    return np.vstack(hits)


_BOX_FACES = [
    ((0, 0), (1, 2)),
    ((0, 1), (1, 2)),
    ((1, 0), (0, 2)),
    ((1, 1), (0, 2)),
    ((2, 0), (0, 1)),
    ((2, 1), (0, 1)),
]


def _box_faces(frames):
    """Facets of parallelepipeds ``frames`` (n, 4, 3): corners (n, 6, 4, 3), outward normals (n, 6, 3)."""
    frames = np.asarray(frames, dtype=float)
    o, e = frames[:, 0], frames[:, 1:]
    center = o + e.sum(axis=1) / 2
    faces, normals = [], []
    for (axis, side), (p, q) in _BOX_FACES:
        base = o + side * e[:, axis]
        quad = np.stack([base, base + e[:, p], base + e[:, p] + e[:, q], base + e[:, q]], axis=1)
        n = np.cross(e[:, p], e[:, q])
        n /= np.linalg.norm(n, axis=1, keepdims=True)
        flip = np.einsum("nd,nd->n", n, quad.mean(axis=1) - center) < 0
        n[flip] *= -1
        faces.append(quad)
        normals.append(n)
    return np.stack(faces, axis=1), np.stack(normals, axis=1)


def _sat_depth(qa, qb):
    """Smallest projection overlap of planar convex quads over their edge normals.

    ``qa``, ``qb``: (k, 4, 2).  Positive means the interiors intersect.
    """
    depth = np.full(len(qa), np.inf)
    for q in (qa, qb):
        e = np.roll(q, -1, axis=1) - q
        axes = np.stack([-e[..., 1], e[..., 0]], axis=-1)
        axes /= np.linalg.norm(axes, axis=-1, keepdims=True)
        pa = np.einsum("kvd,kad->kav", qa, axes)
        pb = np.einsum("kvd,kad->kav", qb, axes)
        ov = np.minimum(pa.max(-1), pb.max(-1)) - np.maximum(pa.min(-1), pb.min(-1))
        depth = np.minimum(depth, ov.min(axis=1))
    return depth


def _edge_share_pairs_3d(tiles, centroids, min_area, chunk=100_000):
    # touching tiles have centroids within the sum of their centroid-to-vertex radii
    radius = max(float(np.linalg.norm(t.vertices - c, axis=1).max()) for t, c in zip(tiles, centroids))
    cand = candidate_pairs(centroids, 2 * radius + _LINE_TOL)
    faces, normals = _box_faces([t.frame for t in tiles])
    offsets = np.einsum("nfd,nfd->nf", normals, faces[:, :, 0, :])
    hits = []
    for lo in range(0, len(cand), chunk):
        part = cand[lo : lo + chunk]
        i, j = part[:, 0], part[:, 1]
        dots = np.einsum("mad,mbd->mab", normals[i], normals[j])
        off = offsets[i][:, :, None] + offsets[j][:, None, :]
        m, a, b = np.nonzero((dots < -1 + 1e-9) & (np.abs(off) < _LINE_TOL))
        if len(m) == 0:
            continue
        qa, qb, nrm = faces[i[m], a], faces[j[m], b], normals[i[m], a]
        u = qa[:, 1] - qa[:, 0]
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        w = np.cross(nrm, u)
        pa = np.stack([np.einsum("kvd,kd->kv", qa, u), np.einsum("kvd,kd->kv", qa, w)], axis=-1)
        pb = np.stack([np.einsum("kvd,kd->kv", qb, u), np.einsum("kvd,kd->kv", qb, w)], axis=-1)
        depth = _sat_depth(pa, pb)
        ok = depth > 1e-3
        # thin overlaps: measure the area exactly
        for k in np.nonzero((depth > 0) & ~ok)[0]:
            area = shapely.Polygon(pa[k]).buffer(0).intersection(shapely.Polygon(pb[k]).buffer(0)).area
            ok[k] = area >= min_area
        hits.append(part[np.unique(m[ok])])
    if not hits:
        return np.zeros((0, 2), dtype=np.int64)
    return np.vstack(hits).astype(np.int64)


def check_overlaps(tiles, eps=EPS_GEOM):
    """Raise :class:`OverlappingTiles` if two 2D tiles overlap with area > ``eps``."""
    if not tiles or tiles[0].dim != 2:
        return
    centroids = np.array([t.centroid for t in tiles])
    reach = 2 * max(t.diameter for t in tiles)
    cand = candidate_pairs(centroids, reach)
    if len(cand) == 0:
        return
    lo = np.array([t.vertices.min(axis=0) for t in tiles])
    hi = np.array([t.vertices.max(axis=0) for t in tiles])
    i, j = cand[:, 0], cand[:, 1]
    box = np.all(np.minimum(hi[i], hi[j]) - np.maximum(lo[i], lo[j]) > eps, axis=1)
    cand = cand[box]
    if len(cand) == 0:
        return
    polys = np.array([shapely.Polygon(t.vertices) for t in tiles], dtype=object)
    area = shapely.area(shapely.intersection(polys[cand[:, 0]], polys[cand[:, 1]]))
    bad = np.nonzero(area > eps)[0]
    if len(bad):
        a, b = cand[bad[0]]
        raise OverlappingTiles(f"OverlappingTiles: tiles {a} and {b} overlap with area {area[bad[0]]:.3g}")


def build_adjacency(
    tiles,
    rule: NeighborRule = EDGE_SHARE,
    guard_radius: float = np.inf,
    center=None,
    validate: bool = True,
) -> Patch:
    """Build a :class:`Patch` with neighbours computed under ``rule``.

    Tile ids must equal list positions.  With ``validate`` the tiles are
    checked for overlapping interiors first (2D only).
    """
    for k, t in enumerate(tiles):
        if t.id != k:
            raise ValueError(f"tile at position {k} has id {t.id}; ids must be positions")
    n = len(tiles)
    if n == 0:
        return Patch([], np.zeros(1, dtype=np.int64), np.zeros(0, dtype=np.int64), rule, guard_radius, center)
    if validate:
        check_overlaps(tiles)
    centroids = np.array([t.centroid for t in tiles], dtype=float)
    dim = centroids.shape[1]
    if dim == 2:
        if rule.kind == EDGE:
            pairs = _edge_share_pairs_2d(tiles, rule.min_shared_measure)
        else:
            pairs = _heesch_pairs_2d(tiles, centroids)
    else:
        if rule.kind != EDGE:
            raise NotImplementedError("HeeschShare adjacency is only implemented in 2D")
        pairs = _edge_share_pairs_3d(tiles, centroids, rule.min_shared_measure)
    indptr, indices = _csr_from_pairs(n, pairs)
    return Patch(list(tiles), indptr, indices, rule, guard_radius, center, _centroids=centroids)


def with_rule(patch: Patch, rule: NeighborRule) -> Patch:
    """The same tiles re-linked under another neighbour rule."""
    out = build_adjacency(patch.tiles, rule, patch.guard_radius, patch.center, validate=False)
    out.guard_box = patch.guard_box
    return out


# -- shells --------------------------------------------------------------------


def _expand(patch, frontier, visited):
    starts, ends = patch.indptr[frontier], patch.indptr[frontier + 1]
    counts = ends - starts
    if counts.sum() == 0:
        return np.zeros(0, dtype=np.int64)
    idx = np.repeat(starts, counts) + (np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts))
    nb = np.unique(patch.indices[idx])
    return nb[~visited[nb]]


def shells(patch: Patch, seed_ids, n: int) -> ShellDecomposition:
    """Coordination shells ``P_0 .. P_n`` of ``seed_ids`` by breadth-first layering.

    ``P_k`` holds the tiles adjacent to ``P_{k-1}`` that are in neither
    ``P_{k-1}`` nor ``P_{k-2}``.
    """
    seed = np.unique(np.asarray(sorted(set(int(s) for s in seed_ids)), dtype=np.int64))
    if len(seed) == 0:
        raise EmptySeed("seed patch is empty")
    if seed[0] < 0 or seed[-1] >= len(patch.tiles):
        raise IndexOutOfRange("seed id outside the patch")
    if n < 0:
        raise ValueError("n must be non-negative")
    visited = np.zeros(len(patch.tiles), dtype=bool)
    visited[seed] = True
    layers = [seed]
    finite_guard = patch.has_guard
    for k in range(1, n + 1):
        frontier = layers[-1]
        if finite_guard and len(frontier) and not patch.in_guard(frontier).all():
            raise GuardBandExceeded(
                f"shell {k - 1} reaches beyond the guard band; "
                f"at most {k - 1} shells can be computed on this patch",
                max_safe_n=k - 1,
            )
        nxt = _expand(patch, frontier, visited)
        visited[nxt] = True
        layers.append(nxt)
    return ShellDecomposition([frozenset(l.tolist()) for l in layers], frozenset(seed.tolist()))


def max_safe_shells(patch: Patch, seed_ids, limit: int = 100000) -> int:
    """Largest n for which :func:`shells` succeeds on this patch and seed."""
    seed = np.asarray(sorted(set(int(s) for s in seed_ids)), dtype=np.int64)
    visited = np.zeros(len(patch.tiles), dtype=bool)
    visited[seed] = True
    frontier = seed
    for k in range(limit):
        if len(frontier) == 0:
            return limit
        if not patch.in_guard(frontier).all():
            return k
        nxt = _expand(patch, frontier, visited)
        visited[nxt] = True
        frontier = nxt
    return limit


def shell_index_array(patch: Patch, seed_ids, n: int) -> np.ndarray:
    """Per-tile shell index (``-1`` for tiles beyond shell ``n``)."""
    sd = shells(patch, seed_ids, n)
    out = np.full(len(patch.tiles), -1, dtype=np.int64)
    for k, s in enumerate(sd.shells):
        out[list(s)] = k
    return out


def coordination_sequence(patch: Patch, seed_ids, n: int) -> list:
    """``[|P_1|, ..., |P_n|]``."""
    return shells(patch, seed_ids, n).sizes()[1:]


def scaled_shell(sd: ShellDecomposition, patch: Patch, k: int) -> np.ndarray:
    """Centroids of the tiles in shell ``k`` divided by ``k``."""
    if not 1 <= k < len(sd.shells):
        raise IndexOutOfRange(f"shell {k} not computed (have 0..{len(sd.shells) - 1})")
    ids = sorted(sd.shells[k])
    return patch.centroids[ids] / k


def polygon_tiles(polygons, labels=None, start_id=0, meta=None) -> list:
    """Wrap vertex arrays as :class:`Tile` objects with ids from ``start_id``."""
    labels = labels if labels is not None else [""] * len(polygons)
    out = []
    for k, (v, lab) in enumerate(zip(polygons, labels)):
        m = meta[k] if meta is not None else {}
        out.append(Tile(start_id + k, np.asarray(v, dtype=float), lab, meta=m))
    return out
