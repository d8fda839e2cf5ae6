"""Empirical growth forms from scaled coordination shells, and related diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateHull, InsufficientSamples, InvalidB
from .geom import (
    Polygon,
    as_points,
    convex_hausdorff,
    convex_hull,
    convex_hull_2d,
    polygon_centroid,
    sample_boundary,
    simplify_convex,
)
from .periodic import GrowthForm, Provenance
from .tiling import Patch, shells

TAU = (1 + math.sqrt(5)) / 2


@dataclass
class ConvergenceReport:
    n: list
    d_successive: list  # Hausdorff(P_n/n, P_m/m) for consecutive sampled n < m
    d_to_candidate: list | None = None
    fitted_C: float | None = None
    hulls: list = field(default_factory=list, repr=False)
    shell_sizes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "n": list(self.n),
            "shell_sizes": list(self.shell_sizes),
            "d_successive": [float(x) for x in self.d_successive],
            "d_to_candidate": None if self.d_to_candidate is None else [float(x) for x in self.d_to_candidate],
            "fitted_C": self.fitted_C,
        }


def _seed_list(seed) -> list:
    return [int(seed)] if np.isscalar(seed) else [int(s) for s in seed]


def hull_centroid(vertices) -> np.ndarray:
    """Area centroid in 2D, vertex mean otherwise."""
    v = as_points(vertices)
    if v.shape[1] == 2 and len(v) >= 3:
        return polygon_centroid(v)
    return v.mean(axis=0)


def fit_C(n_list, distances) -> float:
    """Least-squares ``C`` in ``d ~ C / n``."""
    n = np.asarray(n_list, dtype=float)
    d = np.asarray(distances, dtype=float)
    return float(np.sum(d / n) / np.sum(1.0 / n**2))


def scaled_shells(patch: Patch, seed, n_list):
    """``(P_n - x) / n`` for each requested ``n``, with ``x`` the seed centroid."""
    seeds = _seed_list(seed)
    n_list = [int(k) for k in n_list]
    if min(n_list) < 1:
        raise ValueError("shell indices must be >= 1")
    sd = shells(patch, seeds, max(n_list))
    origin = patch.centroids[seeds].mean(axis=0)
    out = []
    for k in n_list:
        ids = sorted(sd.shells[k])
        out.append((patch.centroids[ids] - origin) / k)
    return out


def estimate_growth_form(
    patch: Patch, seed, n_list, candidate: GrowthForm | None = None
) -> tuple[GrowthForm, ConvergenceReport]:
    """Hull of the largest scaled shell, plus convergence diagnostics.

    Comparisons against ``candidate`` shift each hull by its centroid first,
    since the limit only fixes the form up to a base point.
    """
    n_list = sorted(set(int(k) for k in n_list))
    pts = scaled_shells(patch, seed, n_list)
    hulls = [convex_hull(p).vertices for p in pts]
    d_succ = [convex_hausdorff(hulls[k], hulls[k + 1]) for k in range(len(hulls) - 1)]
    d_cand, c_fit = None, None
    if candidate is not None:
        ref = candidate.vertices - hull_centroid(candidate.vertices)
        d_cand = [convex_hausdorff(h - hull_centroid(h), ref) for h in hulls]
        c_fit = fit_C(n_list, d_cand)
    elif len(d_succ) > 0:
        c_fit = fit_C(n_list[1:], d_succ)
    form = GrowthForm.from_points(hulls[-1], Provenance.EMPIRICAL, samples=pts[-1])
    report = ConvergenceReport(n_list, d_succ, d_cand, c_fit, hulls, [len(p) for p in pts])
    return form, report


def nonconvexity_measure(points, step: float | None = None) -> float:
    """How far the hull boundary of ``points`` strays from the points themselves.

    Directed Hausdorff distance from the sampled hull boundary to the point set.
    ``step`` defaults to 1/2000 of the hull perimeter.
    """
    p = as_points(points, 2)
    if len(p) < 3:
        raise DegenerateHull("need at least 3 points")
    hull = convex_hull_2d(p)
    v = hull.vertices
    if step is None:
        step = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1).sum() / 2000
    from scipy.spatial import cKDTree

    d, _ = cKDTree(p).query(sample_boundary(v, step))
    return float(d.max())


@dataclass
class NoGrowthReport:
    n: list
    ratio: list  # max x of the scaled shell
    variation: float
    gap: float | None
    non_convergent: bool | None
    d_successive: list

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "n": list(self.n),
            "ratio": [float(r) for r in self.ratio],
            "variation": self.variation,
            "gap": self.gap,
            "non_convergent": self.non_convergent,
            "d_successive": [float(x) for x in self.d_successive],
        }


def extent_ratios(patch: Patch, seed, n_list) -> list:
    return [float(p[:, 0].max()) for p in scaled_shells(patch, seed, n_list)]


def detect_no_growth_form(patch: Patch, seed, n_list, gap: float | None = None) -> NoGrowthReport:
    """Track ``r(n) = max x of P_n / n``; flag when its range exceeds ``gap``."""
    n_list = sorted(set(int(k) for k in n_list))
    if len(n_list) < 2:
        raise InsufficientSamples("need at least two shell indices")
    pts = scaled_shells(patch, seed, n_list)
    ratio = [float(p[:, 0].max()) for p in pts]
    hulls = [convex_hull(p).vertices for p in pts]
    d_succ = [convex_hausdorff(hulls[k], hulls[k + 1]) for k in range(len(hulls) - 1)]
    variation = max(ratio) - min(ratio)
    flag = None if gap is None else bool(variation > gap)
    return NoGrowthReport(n_list, ratio, variation, gap, flag, d_succ)


@dataclass
class SquareFit:
    n_vertices: int
    edge_spread: float  # (max - min) / mean edge length of the simplified hull
    scale: float  # best s for s * reference
    hausdorff: float
    simplified: Polygon


def fit_square(form_vertices, reference: GrowthForm, rel_tol: float = 0.03) -> SquareFit:
    """Compare an empirical 2D form with multiples of a reference square.

    The hull is recentred at its centroid and simplified with tolerance
    ``rel_tol`` times its circumradius before counting vertices.
    """
    v = as_points(form_vertices, 2)
    v = v - hull_centroid(convex_hull_2d(v).vertices)
    hull = convex_hull_2d(v)
    radius = float(np.linalg.norm(hull.vertices, axis=1).max())
    simple = simplify_convex(hull, rel_tol * radius)
    e = np.linalg.norm(np.roll(simple.vertices, -1, axis=0) - simple.vertices, axis=1)
    ref = reference.vertices - hull_centroid(reference.vertices)

    def cost(s):
        return convex_hausdorff(hull.vertices, s * ref)

    res = minimize_scalar(cost, bounds=(1e-6, 4.0), method="bounded", options={"xatol": 1e-8})
    return SquareFit(len(simple), float((e.max() - e.min()) / e.mean()), float(res.x), float(res.fun), simple)


@dataclass(frozen=True)
class HatParams:
    b: float
    tau: float
    area_tile: float
    area_growth: float
    edge_length: float
    tilt: float | None = None  # the form is rotated by -tilt


def hat_params(b: float) -> HatParams:
    """Tile(1, b) area and the conjectured hexagonal growth form it implies."""
    if not b > 0 or math.isclose(b, 1.0, rel_tol=0, abs_tol=1e-12):
        raise InvalidB(f"InvalidB: b must be positive and different from 1, got {b}")
    area_tile = math.sqrt(3) * (2 + math.sqrt(3) * b + b * b)
    area_growth = 2 * math.sqrt(3) * area_tile
    edge = math.sqrt(2 * area_growth / (3 * math.sqrt(3)))
    tilt = None
    if math.isclose(b, math.sqrt(3), rel_tol=1e-12):
        tilt = math.atan(math.sqrt(3) / (3 + 2 * TAU))
    return HatParams(b, TAU, area_tile, area_growth, edge, tilt)
