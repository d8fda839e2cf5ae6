"""Growth forms of regular grid tilings, computed two independent ways.

* closed form: in 2D the polygon with vertices ``+-upsilon_i / Delta_i``, in 3D
  the polyhedron with vertices ``+-upsilon_ij / Delta_ij``;
* orthoplex section: the boundary of the cross-polytope intersected with the
  d-plane ``P`` (the row space of the ``d x N`` matrix ``G = [g_1 .. g_N]``),
  projected by ``t -> G t``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTriple, NumericallySingular, ParallelGridVectors
from .geom import EPS_FORM, EPS_GEOM, dedupe, halfspace_intersection
from .multigrid import GridSpec
from .periodic import GrowthForm, Provenance

MAX_ORTHOPLEX_N = 16


@dataclass
class GridFormTables2D:
    alpha: dict = field(default_factory=dict)  # (i, j) -> acute angle
    delta: dict = field(default_factory=dict)
    D: dict = field(default_factory=dict)
    eps: dict = field(default_factory=dict)
    Delta: dict = field(default_factory=dict)  # i -> sum_j 1/delta_ij
    upsilon: dict = field(default_factory=dict)  # i -> vector


@dataclass
class GridFormTables3D:
    h: dict = field(default_factory=dict)  # (i, j) -> g_i x g_j
    alpha: dict = field(default_factory=dict)  # (i, j, k)
    delta: dict = field(default_factory=dict)
    D: dict = field(default_factory=dict)
    eps: dict = field(default_factory=dict)
    Delta: dict = field(default_factory=dict)  # (i, j)
    upsilon: dict = field(default_factory=dict)  # (i, j)


def tables_2d(spec: GridSpec) -> GridFormTables2D:
    if spec.d != 2:
        raise ValueError("tables_2d needs a 2D grid")
    g = spec.vectors
    t = GridFormTables2D()
    for i, j in itertools.permutations(range(spec.N), 2):
        c = abs(float(g[i] @ g[j]))
        if 1 - c <= EPS_GEOM:
            raise ParallelGridVectors(f"ParallelGridVectors: g_{i} and g_{j} are parallel")
        alpha = math.acos(min(1.0, c))
        t.alpha[i, j] = alpha
        t.delta[i, j] = 1 / math.sin(alpha)
        t.D[i, j] = float(g[i, 0] * g[j, 1] - g[i, 1] * g[j, 0])
        t.eps[i, j] = 1 if t.D[i, j] > 0 else -1
    for i in range(spec.N):
        others = [j for j in range(spec.N) if j != i]
        t.Delta[i] = sum(1 / t.delta[i, j] for j in others)
        t.upsilon[i] = sum(t.eps[i, j] * g[j] / t.delta[i, j] for j in others)
    return t


def tables_3d(spec: GridSpec) -> GridFormTables3D:
    """Per-pair normals and per-triple spacings for a 3D grid.

    A triple with ``(h_ij, g_k) = 0`` contributes no term (the line ``l_ij`` never
    crosses family ``k``); a pair with no contributing ``k`` raises
    :class:`DegenerateTriple`.
    """
    if spec.d != 3:
        raise ValueError("tables_3d needs a 3D grid")
    g = spec.vectors
    t = GridFormTables3D()
    for i, j in itertools.permutations(range(spec.N), 2):
        h = np.cross(g[i], g[j])
        if np.linalg.norm(h) <= EPS_GEOM:
            raise ParallelGridVectors(f"ParallelGridVectors: g_{i} and g_{j} are parallel")
        t.h[i, j] = h
    for i, j in itertools.combinations(range(spec.N), 2):
        h = t.h[i, j]
        hn = float(np.linalg.norm(h))
        total, ups = 0.0, np.zeros(3)
        for k in range(spec.N):
            if k in (i, j):
                continue
            hk = float(h @ g[k])
            if abs(hk) <= EPS_GEOM * hn:
                continue
            t.alpha[i, j, k] = math.asin(max(-1.0, min(1.0, hk / hn)))
            t.delta[i, j, k] = hn / abs(hk)
            t.D[i, j, k] = float(np.linalg.det(np.array([g[i], g[j], g[k]])))
            t.eps[i, j, k] = 1 if t.D[i, j, k] > 0 else -1
            total += 1 / t.delta[i, j, k]
            ups += t.eps[i, j, k] * g[k] / t.delta[i, j, k]
        if total == 0:
            raise DegenerateTriple(f"DegenerateTriple: line l_{i}{j} is parallel to every other family")
        t.Delta[i, j] = total
        t.upsilon[i, j] = ups
    return t


def growth_form_formula_2d(spec: GridSpec) -> GrowthForm:
    t = tables_2d(spec)
    pts = [t.upsilon[i] / t.Delta[i] for i in range(spec.N)]
    pts = np.array(pts + [-p for p in pts])
    return GrowthForm.from_points(dedupe(pts, EPS_FORM), Provenance.FORMULA2D)


def growth_form_formula_3d(spec: GridSpec) -> GrowthForm:
    t = tables_3d(spec)
    pts = [t.upsilon[k] / t.Delta[k] for k in sorted(t.Delta)]
    pts = np.array(pts + [-p for p in pts])
    return GrowthForm.from_points(dedupe(pts, EPS_FORM), Provenance.FORMULA3D)


def growth_form_formula(spec: GridSpec) -> GrowthForm:
    return growth_form_formula_2d(spec) if spec.d == 2 else growth_form_formula_3d(spec)


def orthoplex_halfspaces(spec: GridSpec):
    """Halfspaces ``<sum_i s_i g_i, y> <= 1`` over sign patterns, one per ``+-`` pair dropped."""
    g = spec.vectors
    out = []
    seen = set()
    for signs in itertools.product((-1.0, 1.0), repeat=spec.N):
        n = np.asarray(signs) @ g
        key = tuple(np.round(n, 9))
        if key in seen or np.linalg.norm(n) <= EPS_GEOM:
            continue
        seen.add(key)
        out.append((n, 1.0))
    return out


def growth_form_orthoplex(spec: GridSpec) -> GrowthForm:
    """Projected section of the orthoplex boundary by the plane ``P``.

    Points of ``P`` are ``t = G^T y``; the section is ``sum_i |<g_i, y>| = 1``,
    i.e. the boundary of the intersection of the sign-pattern halfspaces, and
    ``pi_1(t) = G G^T y``.
    """
    if spec.N > MAX_ORTHOPLEX_N:
        raise ValueError(f"orthoplex section is limited to N <= {MAX_ORTHOPLEX_N}")
    gram = spec.gram()
    if np.linalg.cond(gram) > 1e8:
        raise NumericallySingular("NumericallySingular: G G^T is ill-conditioned")
    section = halfspace_intersection(orthoplex_halfspaces(spec), spec.d)
    pts = section.vertices @ gram.T
    provenance = Provenance.ORTHOPLEX
    return GrowthForm.from_points(pts, provenance)
