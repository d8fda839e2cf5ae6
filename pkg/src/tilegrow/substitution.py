"""Substitution (inflation) tilings: chair, L-tetromino, and the strips tiling.

A substitution system inflates each prototile by a linear map ``Q`` and cuts
``Q T`` into rigidly moved prototile copies.  Rules are stored as integer
rotation/reflection matrices plus translations and are machine-checked on
construction.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.ops import polylabel, unary_union

from .errors import InvalidRules
from .geom import polygon_centroid, signed_area
from .tiling import EDGE_SHARE, NeighborRule, Patch, Tile, build_adjacency

ROT0 = ((1, 0), (0, 1))
ROT90 = ((0, -1), (1, 0))
ROT180 = ((-1, 0), (0, -1))
ROT270 = ((0, 1), (-1, 0))
MIRROR_X = ((-1, 0), (0, 1))


@dataclass
class Placement:
    """``x -> matrix @ x + translation`` applied to prototile ``target``."""

    matrix: np.ndarray
    translation: np.ndarray
    target: str

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        self.translation = np.asarray(self.translation, dtype=float)


@dataclass
class SubstitutionSystem:
    prototiles: dict  # label -> (k, 2) counterclockwise vertices
    inflation: np.ndarray
    rules: dict  # label -> list[Placement]
    markers: dict = field(default_factory=dict)  # label -> marked point in prototile coordinates
    name: str = ""

    def __post_init__(self):
        self.prototiles = {k: np.asarray(v, dtype=float) for k, v in self.prototiles.items()}
        self.inflation = np.asarray(self.inflation, dtype=float)
        self.markers = {k: np.asarray(v, dtype=float) for k, v in self.markers.items()}
        self.validate()

    def area(self, label) -> float:
        return signed_area(self.prototiles[label])

    def validate(self):
        """Check that each inflated prototile is cut exactly into its placed copies."""
        q = self.inflation
        det = abs(float(np.linalg.det(q)))
        if det <= 1:
            raise InvalidRules("inflation map must expand")
        for label, verts in self.prototiles.items():
            if signed_area(verts) <= 0:
                raise InvalidRules(f"prototile {label!r} must be counterclockwise")
            if label not in self.rules or not self.rules[label]:
                raise InvalidRules(f"no dissection rule for {label!r}")
            pieces = []
            for pl in self.rules[label]:
                if pl.target not in self.prototiles:
                    raise InvalidRules(f"rule for {label!r} places unknown prototile {pl.target!r}")
                if not np.allclose(pl.matrix @ pl.matrix.T, np.eye(2)):
                    raise InvalidRules("placements must be rigid motions")
                if not np.allclose(pl.matrix @ q, q @ pl.matrix):
                    raise InvalidRules("placement matrices must commute with the inflation")
                pieces.append(shapely.Polygon(self.prototiles[pl.target] @ pl.matrix.T + pl.translation))
            total = sum(p.area for p in pieces)
            target_area = det * signed_area(verts)
            if abs(total - target_area) > 1e-9 * target_area:
                raise InvalidRules(f"{label!r}: pieces have area {total} but Q T has {target_area}")
            big = shapely.Polygon(verts @ q.T)
            union = unary_union(pieces)
            if union.symmetric_difference(big).area > 1e-9 * target_area:
                raise InvalidRules(f"{label!r}: pieces do not cover Q T exactly")
            for a in range(len(pieces)):
                for b in range(a + 1, len(pieces)):
                    if pieces[a].intersection(pieces[b]).area > 1e-9:
                        raise InvalidRules(f"{label!r}: pieces {a} and {b} overlap")

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "substitution",
            "name": self.name,
            "inflation": self.inflation.tolist(),
            "prototiles": [{"label": k, "polygon": v.tolist()} for k, v in self.prototiles.items()],
            "markers": {k: v.tolist() for k, v in self.markers.items()},
            "rules": {
                k: [
                    {"affine": pl.matrix.ravel().tolist() + pl.translation.tolist(), "target": pl.target}
                    for pl in rules
                ]
                for k, rules in self.rules.items()
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SubstitutionSystem":
        rules = {
            k: [Placement(np.reshape(r["affine"][:4], (2, 2)), r["affine"][4:], r["target"]) for r in rs]
            for k, rs in data["rules"].items()
        }
        return cls(
            {p["label"]: p["polygon"] for p in data["prototiles"]},
            data["inflation"],
            rules,
            data.get("markers", {}),
            data.get("name", ""),
        )

    @classmethod
    def from_json(cls, path) -> "SubstitutionSystem":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def chair_system() -> SubstitutionSystem:
    """Chair (L-tromino) with ``Q = 2 Id``.

    ``2 T`` is cut into a corner copy, a central copy shifted by (1, 1), and two
    copies rotated by +90 and -90 degrees filling the arms.
    """
    chair = [[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]]
    rules = [
        Placement(ROT0, (0, 0), "chair"),
        Placement(ROT0, (1, 1), "chair"),
        Placement(ROT90, (4, 0), "chair"),
        Placement(ROT270, (0, 4), "chair"),
    ]
    # marked point: the reflex (inner) corner of the chair
    return SubstitutionSystem({"chair": chair}, 2 * np.eye(2), {"chair": rules}, {"chair": (1.0, 1.0)}, "chair")


# the four ways to cut the doubled L into four L's; "rot" uses rotations only
_L_DISSECTIONS = {
    "rot": [
        Placement(ROT270, (0, 2), "L"),
        Placement(ROT0, (0, 2), "L"),
        Placement(ROT180, (2, 6), "L"),
        Placement(ROT90, (4, 0), "L"),
    ],
    "mirror-a": [
        Placement(((0, 1), (1, 0)), (0, 0), "L"),
        Placement(ROT0, (0, 2), "L"),
        Placement(ROT180, (2, 6), "L"),
        Placement(((0, -1), (-1, 0)), (4, 2), "L"),
    ],
    "mirror-b": [
        Placement(((0, 1), (1, 0)), (0, 0), "L"),
        Placement(MIRROR_X, (2, 2), "L"),
        Placement(((1, 0), (0, -1)), (0, 6), "L"),
        Placement(((0, -1), (-1, 0)), (4, 2), "L"),
    ],
    "mirror-c": [
        Placement(ROT270, (0, 2), "L"),
        Placement(MIRROR_X, (2, 2), "L"),
        Placement(((1, 0), (0, -1)), (0, 6), "L"),
        Placement(ROT90, (4, 0), "L"),
    ],
}


def _l_rules(variant: str):
    return [Placement(p.matrix, p.translation, p.target) for p in _L_DISSECTIONS[variant]]


def l_tetromino_system(variant: str = "rot") -> SubstitutionSystem:
    """L-tetromino (2x1 foot, 1x3 stem) with ``Q = 2 Id``, rep-4 dissection."""
    ell = [[0, 0], [2, 0], [2, 1], [1, 1], [1, 3], [0, 3]]
    if variant not in _L_DISSECTIONS:
        raise InvalidRules(f"unknown dissection {variant!r}; choose from {sorted(_L_DISSECTIONS)}")
    rules = _l_rules(variant)
    return SubstitutionSystem({"L": ell}, 2 * np.eye(2), {"L": rules}, {"L": (0.5, 0.5)}, f"ltetromino-{variant}")


def _bbox_of(verts):
    return verts.min(axis=0), verts.max(axis=0)


def supertile(
    system: SubstitutionSystem,
    seed: str,
    level: int,
    clip_center=None,
    clip_radius: float | None = None,
    rule: NeighborRule = EDGE_SHARE,
    build: bool = True,
):
    """Tiles of ``Q^level`` applied to prototile ``seed``.

    With ``clip_center``/``clip_radius`` only tiles whose centroid lies in that
    disc are kept (whole subtrees outside it are skipped).  Tile ids follow
    depth-first order of the substitution tree; ``meta['path']`` records the
    child indices from the root.  Returns a :class:`Patch` (or the tile list if
    ``build`` is false).
    """
    if level < 0:
        raise ValueError("level must be non-negative")
    q = system.inflation
    clip_center = None if clip_center is None else np.asarray(clip_center, dtype=float)
    qpow = [np.linalg.matrix_power(q, k) for k in range(level + 1)]
    inflated = {lab: [v @ qp.T for qp in qpow] for lab, v in system.prototiles.items()}

    out = []
    # stack entries: (label, A, b, depth, path); region = A @ (Q^(level-depth) T) + b
    stack = [(seed, np.eye(2), np.zeros(2), 0, "")]
    while stack:
        lab, a, b, depth, path = stack.pop()
        remaining = level - depth
        if clip_center is not None:
            region = inflated[lab][remaining] @ a.T + b
            lo, hi = _bbox_of(region)
            nearest = np.clip(clip_center, lo, hi)
            if np.linalg.norm(nearest - clip_center) > clip_radius:
                continue
        if remaining == 0:
            verts = system.prototiles[lab] @ a.T + b
            c = polygon_centroid(verts)
            if clip_center is not None and np.linalg.norm(c - clip_center) > clip_radius:
                continue
            marker = system.markers.get(lab)
            meta = {"path": path}
            if marker is not None:
                meta["marker"] = a @ marker + b
            out.append((verts, lab, c, meta))
            continue
        scale = qpow[remaining - 1]
        children = system.rules[lab]
        for k in range(len(children) - 1, -1, -1):
            pl = children[k]
            stack.append((pl.target, a @ pl.matrix, a @ (scale @ pl.translation) + b, depth + 1, path + str(k)))

    tiles = [Tile(k, v, lab, centroid=c, meta=m) for k, (v, lab, c, m) in enumerate(out)]
    if not build:
        return tiles
    region = shapely.Polygon(inflated[seed][level])
    if clip_center is None:
        center = np.asarray(polylabel(region, tolerance=1e-3).coords[0])
        radius = np.inf
    else:
        center, radius = clip_center, clip_radius
    inner = region.exterior.distance(shapely.Point(center)) if region.contains(shapely.Point(center)) else 0.0
    diam = max(t.diameter for t in tiles) if tiles else 0.0
    complete = min(radius, inner - diam)
    return build_adjacency(tiles, rule, guard_radius=complete - 2 * diam, center=center, validate=False)


def supertile_center(system: SubstitutionSystem, seed: str, level: int):
    """Most interior point of ``Q^level T`` and its distance to the boundary."""
    q = np.linalg.matrix_power(system.inflation, level)
    region = shapely.Polygon(system.prototiles[seed] @ q.T)
    p = polylabel(region, tolerance=1e-3)
    return np.asarray(p.coords[0]), region.exterior.distance(p)


def disc_patch(system: SubstitutionSystem, seed: str, radius: float, rule: NeighborRule = EDGE_SHARE) -> Patch:
    """Smallest supertile level whose interior holds a disc of ``radius``, clipped to it.

    The patch is centred at the supertile's most interior point.
    """
    level = 0
    while True:
        center, inner = supertile_center(system, seed, level)
        if inner >= radius:
            return supertile(system, seed, level, clip_center=center, clip_radius=radius, rule=rule)
        level += 1


# -- dual graph ----------------------------------------------------------------


@dataclass
class DualGraph:
    points: np.ndarray  # one marked point per tile
    edges: np.ndarray  # (m, 2) tile-id pairs, i < j

    def adjacency_lists(self) -> list:
        adj = [[] for _ in range(len(self.points))]
        for a, b in self.edges:
            adj[a].append(int(b))
            adj[b].append(int(a))
        return [sorted(x) for x in adj]


def chair_dual_graph(patch: Patch) -> DualGraph:
    """Marked point per chair, edges between neighbouring chairs."""
    points = np.array([t.meta.get("marker", t.centroid) for t in patch.tiles], dtype=float)
    return DualGraph(points, patch.edge_list())


def diagonal_edges(graph: DualGraph, eps=1e-9) -> np.ndarray:
    """Boolean mask of dual edges that are not axis-parallel.

    With markers at the inner corners the chair markers split into a square
    lattice of spacing 2 (joined by axis-parallel edges) and square centres,
    each joined to the corners of its square by half-diagonals.
    """
    d = graph.points[graph.edges[:, 1]] - graph.points[graph.edges[:, 0]]
    return (np.abs(d[:, 0]) > eps) & (np.abs(d[:, 1]) > eps)


def graph_distances(n: int, edges: np.ndarray) -> np.ndarray:
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path

    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    a = csr_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n, n))
    return shortest_path(a, directed=False, unweighted=True)


def diagonal_deletion_check(graph: DualGraph) -> tuple:
    """Compare distances between lattice vertices with and without the diagonals.

    Lattice vertices are those with at least one axis-parallel edge; square
    centres only carry diagonals.  Returns ``(unchanged, n_lattice, n_diagonals)``.
    """
    n = len(graph.points)
    diag = diagonal_edges(graph)
    keep = np.bincount(graph.edges[~diag].ravel(), minlength=n) > 0
    full = graph_distances(n, graph.edges)
    pruned = graph_distances(n, graph.edges[~diag])
    idx = np.ix_(keep, keep)
    return bool(np.array_equal(full[idx], pruned[idx])), int(keep.sum()), int(diag.sum())


# -- strips tiling -------------------------------------------------------------


def strip_layout(levels: int) -> list:
    """``(x_start, width, tile_size)`` for the strips ``4^i s, 4^i l``, ``i < levels``."""
    out = []
    x = 0
    for i in range(levels):
        out.append((x, 4**i, 1))
        x += 4**i
        out.append((x, 2 * 4**i, 2))
        x += 2 * 4**i
    return out


def strips_tiling(levels: int, half_height: int = 32, left: int = 32, right: int | None = None) -> Patch:
    """1x1 and 2x2 squares in vertical strips of growing width.

    Strips start at ``x = 0``: ``4^0`` columns of unit squares, ``4^0`` columns
    of 2x2 squares, ``4^1`` of each, and so on up to ``4^(levels-1)``.  To make
    a tiling of the whole plane, the half-plane ``x < 0`` is filled with unit
    squares; the window spans ``[-left, right] x [-half_height, half_height]``.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    layout = strip_layout(levels)
    end = layout[-1][0] + layout[-1][1]
    right = end if right is None else min(right, end)
    if half_height % 2:
        raise ValueError("half_height must be even so 2x2 rows align")
    squares = []  # (x, y, size, strip index)
    xs = np.arange(-left, 0)
    ys = np.arange(-half_height, half_height)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    squares.append(np.stack([gx.ravel(), gy.ravel(), np.ones(gx.size, int), np.full(gx.size, -1)], axis=1))
    for k, (x0, width, size) in enumerate(layout):
        if x0 >= right:
            break
        xs = np.arange(x0, min(x0 + width, right), size)
        ys = np.arange(-half_height, half_height, size)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        squares.append(np.stack([gx.ravel(), gy.ravel(), np.full(gx.size, size), np.full(gx.size, k)], axis=1))
    sq = np.vstack(squares)
    order = np.lexsort((sq[:, 1], sq[:, 0]))
    sq = sq[order]
    tiles = []
    corner = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    for k, (x, y, s, strip) in enumerate(sq.tolist()):
        verts = corner * s + (x, y)
        tiles.append(Tile(k, verts, "s" if s == 1 else "l", centroid=np.array([x + s / 2, y + s / 2]), meta={"strip": strip}))
    diam = 2 * np.sqrt(2)
    margin = 3 * diam
    patch = build_adjacency(tiles, EDGE_SHARE, center=np.array([0.5, 0.0]), validate=False)
    patch.guard_box = np.array([[-left + margin, -half_height + margin], [right - margin, half_height - margin]])
    return patch


def strips_seed(patch: Patch) -> int:
    """The unit square ``[0, 1] x [0, 1]``, at the left edge of the strips."""
    return patch.nearest_tile((0.5, 0.5))
