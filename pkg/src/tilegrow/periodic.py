"""Periodic tilings and their growth forms.

A periodic tiling is a lattice plus a handful of fundamental tiles.  Its growth
form is the convex hull of the vectors ``v / k`` where ``f + v`` is a lattice
translate of a fundamental tile ``f`` found in the ``k``-th coordination shell
of ``f`` (shells ``1..z``, ``z`` = number of fundamental tiles).
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import GuardBandExceeded, InvalidSpec, NoEquivalentsFound, OverlappingTiles
from .geom import (
    EPS_FORM,
    EPS_GEOM,
    ConvexPolytope3,
    Polygon,
    convex_hull,
    is_centrosymmetric,
    polygon_centroid,
    signed_area,
)
from .tiling import EDGE_SHARE, HEESCH_SHARE, NeighborRule, Patch, Tile, build_adjacency, check_overlaps, shells


class Provenance(str, Enum):
    ALGORITHM1 = "Algorithm1"
    ORTHOPLEX = "OrthoplexSection"
    FORMULA2D = "GridFormula2D"
    FORMULA3D = "GridFormula3D"
    EMPIRICAL = "Empirical"


@dataclass
class GrowthForm:
    """A convex growth form given by its extreme vertices."""

    dim: int
    vertices: np.ndarray
    provenance: Provenance
    shape: Polygon | ConvexPolytope3 | None = field(default=None, repr=False)
    samples: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_points(cls, points, provenance, samples=None, check_symmetry=True):
        pts = np.asarray(points, dtype=float)
        shape = convex_hull(pts)
        form = cls(pts.shape[1], shape.vertices, Provenance(provenance), shape, samples)
        if check_symmetry and form.provenance is not Provenance.EMPIRICAL and not form.is_centrosymmetric():
            raise ValueError(f"{form.provenance.value} form is not centrosymmetric")
        return form

    def is_centrosymmetric(self, eps=EPS_FORM) -> bool:
        return is_centrosymmetric(self.vertices, eps)

    @property
    def circumradius(self) -> float:
        return float(np.linalg.norm(self.vertices, axis=1).max())

    def scaled(self, s: float) -> "GrowthForm":
        return GrowthForm.from_points(self.vertices * s, self.provenance, check_symmetry=False)

    def to_dict(self) -> dict:
        out = {
            "schema": 1,
            "provenance": self.provenance.value,
            "dim": self.dim,
            "vertices": self.vertices.tolist(),
        }
        if self.dim == 3:
            out["faces"] = [list(f) for f in self.shape.faces]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "GrowthForm":
        return cls.from_points(data["vertices"], data["provenance"], check_symmetry=False)


@dataclass
class PeriodicSpec:
    """Lattice basis (rows) plus labelled fundamental tiles."""

    basis: np.ndarray
    tiles: list  # list of (label, (k, 2) vertex array)
    name: str = ""

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=float)
        self.tiles = [(str(lab), np.asarray(v, dtype=float)) for lab, v in self.tiles]

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.basis))

    @property
    def z(self) -> int:
        return len(self.tiles)

    def fundamental_diameter(self) -> float:
        pts = np.vstack([v for _, v in self.tiles])
        return float(np.max(np.linalg.norm(pts[:, None] - pts[None], axis=2)))

    def max_tile_diameter(self) -> float:
        return max(float(np.max(np.linalg.norm(v[:, None] - v[None], axis=2))) for _, v in self.tiles)

    def validate(self):
        """Raise :class:`InvalidSpec` naming the first violated invariant."""
        if self.basis.shape != (2, 2):
            raise InvalidSpec("InvalidSpec: basis must be two 2D vectors")
        if abs(self.det) <= EPS_GEOM:
            raise InvalidSpec("InvalidSpec: lattice basis is degenerate (det = 0)")
        if not self.tiles:
            raise InvalidSpec("InvalidSpec: no fundamental tiles")
        labels = [lab for lab, _ in self.tiles]
        if len(set(labels)) != len(labels):
            raise InvalidSpec("InvalidSpec: fundamental tile labels must be distinct")
        for lab, v in self.tiles:
            try:
                Polygon(v)
            except ValueError as exc:
                raise InvalidSpec(f"InvalidSpec: tile {lab!r}: {exc}") from None
        total = sum(signed_area(v) for _, v in self.tiles)
        if abs(total - abs(self.det)) > 1e-9 * max(1.0, abs(self.det)):
            raise InvalidSpec(
                f"InvalidSpec: fundamental tiles have area {total:.12g} but the lattice cell has {abs(self.det):.12g}"
            )
        # translates must not overlap
        small = _translates(self, 2.5 * self.fundamental_diameter() + 1e-9)
        try:
            check_overlaps(small)
        except OverlappingTiles as exc:
            raise OverlappingTiles(str(exc)) from None

    def scaled(self, s: float) -> "PeriodicSpec":
        return PeriodicSpec(self.basis * s, [(lab, v * s) for lab, v in self.tiles], self.name)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "periodic",
            "name": self.name,
            "basis": self.basis.tolist(),
            "tiles": [{"label": lab, "polygon": v.tolist()} for lab, v in self.tiles],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PeriodicSpec":
        try:
            tiles = [(t["label"], t["polygon"]) for t in data["tiles"]]
            return cls(data["basis"], tiles, data.get("name", ""))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"InvalidSpec: malformed periodic spec ({exc})") from None

    @classmethod
    def from_json(cls, path) -> "PeriodicSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _translates(spec: PeriodicSpec, radius: float, center=(0.0, 0.0)) -> list:
    center = np.asarray(center, dtype=float)
    cents = [polygon_centroid(v) for _, v in spec.tiles]
    inv = np.linalg.inv(spec.basis.T)
    reach = radius + max(np.linalg.norm(c - center) for c in cents) + 1.0
    bound = int(np.ceil(reach * np.linalg.norm(inv, 2))) + 1
    rng = np.arange(-bound, bound + 1)
    n1, n2 = np.meshgrid(rng, rng, indexing="ij")
    lattice = np.stack([n1.ravel(), n2.ravel()], axis=1)
    shifts = lattice @ spec.basis
    out = []
    for fi, ((lab, v), c) in enumerate(zip(spec.tiles, cents)):
        inside = np.linalg.norm(c + shifts - center, axis=1) <= radius
        for n, s in zip(lattice[inside], shifts[inside]):
            out.append((int(n[0]), int(n[1]), fi, lab, v + s, c + s))
    out.sort(key=lambda r: (r[0], r[1], r[2]))
    return [
        Tile(k, v, lab, centroid=c, meta={"lattice": (n1_, n2_), "fundamental": fi})
        for k, (n1_, n2_, fi, lab, v, c) in enumerate(out)
    ]


def unroll(spec: PeriodicSpec, radius: float, rule: NeighborRule = EDGE_SHARE, validate=True) -> Patch:
    """All lattice translates of the fundamental tiles with centroid within ``radius``.

    Each tile's ``meta`` records its lattice coordinates and fundamental class.
    """
    if validate:
        spec.validate()
    if radius <= 2 * spec.fundamental_diameter():
        raise ValueError("radius must exceed twice the fundamental-domain diameter")
    tiles = _translates(spec, radius)
    guard = radius - 2 * spec.max_tile_diameter()
    return build_adjacency(tiles, rule, guard_radius=guard, center=np.zeros(2), validate=False)


def equivalent_mod_lattice(t1: Tile, t2: Tile, spec: PeriodicSpec, eps=EPS_GEOM):
    """Lattice vector ``v`` with ``t2 = t1 + v``, or ``None``."""
    if t1.label != t2.label or len(t1.vertices) != len(t2.vertices):
        return None
    v = np.asarray(t2.centroid) - np.asarray(t1.centroid)
    coeff = np.linalg.solve(spec.basis.T, v)
    if np.any(np.abs(coeff - np.round(coeff)) > 1e-7):
        return None
    v = np.round(coeff) @ spec.basis
    a = Polygon(t1.vertices + v, validate=False).canonical(1e-7).vertices
    b = Polygon(t2.vertices, validate=False).canonical(1e-7).vertices
    scale = max(1.0, float(np.abs(b).max()))
    if not np.all(np.abs(a - b) <= max(eps, 1e-12) * scale * 100):
        return None
    return v


def _collect_w(spec, patch, fid, z):
    base = patch.tiles[fid]
    sd = shells(patch, [fid], z)
    out = []
    for k in range(1, z + 1):
        for tid in sorted(sd.shells[k]):
            v = equivalent_mod_lattice(base, patch.tiles[tid], spec)
            if v is not None:
                out.append(v / k)
    return out


def growth_form_periodic(
    spec: PeriodicSpec,
    rule: NeighborRule = EDGE_SHARE,
    n_shells: int | None = None,
    threads: int = 1,
) -> GrowthForm:
    """Growth form of a periodic tiling by collecting ``w = v / k`` vectors."""
    spec.validate()
    z = spec.z if n_shells is None else int(n_shells)
    if z < 1:
        raise ValueError("need at least one shell")
    diam = spec.max_tile_diameter()
    radius = max(2.5 * spec.fundamental_diameter(), (z + 3) * 2 * diam) + 1e-9
    while True:
        patch = unroll(spec, radius, rule, validate=False)
        fids = [
            next(t.id for t in patch.tiles if t.meta["lattice"] == (0, 0) and t.meta["fundamental"] == fi)
            for fi in range(spec.z)
        ]
        try:
            if threads > 1:
                with ThreadPoolExecutor(threads) as pool:
                    per_f = list(pool.map(lambda f: _collect_w(spec, patch, f, z), fids))
            else:
                per_f = [_collect_w(spec, patch, f, z) for f in fids]
            break
        except GuardBandExceeded:
            radius *= 2
    for (lab, _), ws in zip(spec.tiles, per_f):
        if not ws:
            raise NoEquivalentsFound(f"no translate of fundamental tile {lab!r} within {z} shells")
    w = np.array([x for ws in per_f for x in ws])
    return GrowthForm.from_points(w, Provenance.ALGORITHM1, samples=w)


def growth_form_heesch(spec: PeriodicSpec, n_shells: int | None = None) -> GrowthForm:
    """Algorithm-1 growth form under the Heesch (any-contact) neighbour rule."""
    return growth_form_periodic(spec, HEESCH_SHARE, n_shells)


# -- built-in specs ------------------------------------------------------------

_H = math.sqrt(3) / 2


def square44() -> PeriodicSpec:
    return PeriodicSpec([[1, 0], [0, 1]], [("square", [[0, 0], [1, 0], [1, 1], [0, 1]])], "square44")


def hex63() -> PeriodicSpec:
    """Regular hexagons with unit edges, pointy side up."""
    hexagon = [[math.cos(math.radians(30 + 60 * k)), math.sin(math.radians(30 + 60 * k))] for k in range(6)]
    return PeriodicSpec([[math.sqrt(3), 0], [math.sqrt(3) / 2, 1.5]], [("hexagon", hexagon)], "hex63")


def tri36() -> PeriodicSpec:
    return PeriodicSpec(
        [[1, 0], [0.5, _H]],
        [("up", [[0, 0], [1, 0], [0.5, _H]]), ("down", [[1, 0], [1.5, _H], [0.5, _H]])],
        "tri36",
    )


def arch3344() -> PeriodicSpec:
    """(3^3.4^2): rows of unit squares separated by rows of unit triangles.

    Square rows sit at ``y in [k (1 + h), k (1 + h) + 1]`` with ``h = sqrt(3)/2``,
    each row shifted by 1/2 against the previous one.
    """
    return PeriodicSpec(
        [[1, 0], [0.5, 1 + _H]],
        [
            ("square", [[0, 0], [1, 0], [1, 1], [0, 1]]),
            ("up", [[0, 1], [1, 1], [0.5, 1 + _H]]),
            ("down", [[1, 1], [1.5, 1 + _H], [0.5, 1 + _H]]),
        ],
        "arch3344",
    )


LIBRARY = {"square44": square44, "hex63": hex63, "tri36": tri36, "arch3344": arch3344}
