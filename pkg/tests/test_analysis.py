from __future__ import annotations

import math

import numpy as np
import pytest

from tilegrow.analysis import (
    TAU,
    detect_no_growth_form,
    estimate_growth_form,
    fit_C,
    fit_square,
    hat_params,
    hull_centroid,
    nonconvexity_measure,
    scaled_shells,
)
from tilegrow.errors import DegenerateHull, InsufficientSamples, InvalidB
from tilegrow.geom import convex_hausdorff, sample_boundary
from tilegrow.gridform import growth_form_formula_2d
from tilegrow.multigrid import dual_tiling, penrose
from tilegrow.periodic import Provenance, growth_form_periodic, square44, unroll
from tilegrow.presets import build_patch, default_seed, load_preset
from tilegrow.substitution import strips_seed, strips_tiling

SQUARE = growth_form_periodic(square44())


def test_square_estimate():
    patch = unroll(square44(), 40)
    seed = patch.nearest_tile((0.5, 0.5))
    form, rep = estimate_growth_form(patch, seed, [8, 16, 24], candidate=SQUARE)
    assert form.provenance is Provenance.EMPIRICAL
    assert all(d <= 2 / n for d, n in zip(rep.d_to_candidate, rep.n))
    assert rep.shell_sizes == [32, 64, 96]
    assert all(d >= 0 for d in rep.d_successive)


def test_single_shell_is_neighbour_hull():
    patch = unroll(square44(), 10)
    seed = patch.nearest_tile((0.5, 0.5))
    form, rep = estimate_growth_form(patch, seed, [1])
    assert convex_hausdorff(form.vertices, SQUARE.vertices) < 1e-12
    assert rep.d_successive == [] and rep.fitted_C is None


def test_scaled_shells_recentre_on_seed():
    patch = unroll(square44(), 20)
    seed = patch.nearest_tile((3.5, -2.5))
    (pts,) = scaled_shells(patch, seed, [5])
    assert np.allclose(np.abs(pts).sum(axis=1), 1)
    with pytest.raises(ValueError):
        scaled_shells(patch, seed, [0])


def test_fit_c():
    n = np.array([8, 16, 32])
    assert fit_C(n, 0.7 / n) == pytest.approx(0.7)


def test_hull_centroid():
    sq = np.array([[0, 0], [2, 0], [2, 2], [0, 2]], dtype=float)
    assert np.allclose(hull_centroid(sq), (1, 1))


@pytest.mark.parametrize("name", ["square44", "hex63", "arch3344", "penrose", "hexagrid", "chair"])
def test_successive_distances_shrink(name):
    spec = load_preset(name)
    n_list = [8, 16, 32]
    patch = build_patch(spec, reach=32 * 2.1 + 8)
    _, rep = estimate_growth_form(patch, default_seed(spec, patch), n_list)
    assert rep.d_successive[-1] <= rep.d_successive[0] + 1e-12


def test_nonconvexity():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    dense = sample_boundary(sq, 1e-3)
    assert nonconvexity_measure(dense) < 1e-3
    # a dent of depth h and half-width w leaves a hull point min(h, w) from the set
    for lo, hi, expected in [(1 / 3, 2 / 3, 1 / 6), (0.2, 0.8, 0.2)]:
        pts = dense.copy()
        mid = (pts[:, 1] == 0) & (pts[:, 0] > lo) & (pts[:, 0] < hi)
        pts[mid, 1] = 0.2
        assert nonconvexity_measure(pts) == pytest.approx(expected, abs=2e-3)
    with pytest.raises(DegenerateHull):
        nonconvexity_measure(sq[:2])


def test_no_growth_form_detection():
    control = unroll(square44(), 80)
    rep = detect_no_growth_form(control, control.nearest_tile((0.5, 0.5)), [16, 23, 32, 45, 64], gap=0.05)
    assert rep.variation < 0.05 and rep.non_convergent is False
    strips = strips_tiling(4, half_height=140, left=80, right=140)
    rep = detect_no_growth_form(strips, strips_seed(strips), [8, 11, 16, 23, 32, 45, 64])
    assert rep.gap is None and rep.non_convergent is None
    assert rep.variation > 0.1
    with pytest.raises(InsufficientSamples):
        detect_no_growth_form(control, 0, [16])


def test_fit_square():
    fit = fit_square(2 * SQUARE.vertices + 0.3, SQUARE)
    assert fit.n_vertices == 4 and fit.edge_spread < 1e-9
    assert fit.scale == pytest.approx(2.0, abs=1e-6) and fit.hausdorff < 1e-6
    octagon = np.array([(math.cos(a), math.sin(a)) for a in np.arange(8) * math.pi / 4])
    assert fit_square(octagon, SQUARE).n_vertices == 8


def test_hat_params_sqrt3():
    p = hat_params(math.sqrt(3))
    assert p.area_tile == pytest.approx(8 * math.sqrt(3))
    assert p.area_growth == pytest.approx(48)
    assert p.edge_length == pytest.approx(4 * math.sqrt(2) / 3**0.25)
    assert p.tilt == pytest.approx(0.270919, abs=1e-5)
    assert p.tau == pytest.approx(TAU)


def test_hat_params_b3():
    p = hat_params(3)
    assert p.area_tile == pytest.approx(9 + 11 * math.sqrt(3))
    assert p.area_growth == pytest.approx(66 + 18 * math.sqrt(3))
    assert p.edge_length == pytest.approx(2 * math.sqrt(3 + 11 / math.sqrt(3)))
    assert p.tilt is None


@pytest.mark.parametrize("b", [0.3, 0.5, 2.0, 3.0, 7.5, math.sqrt(3)])
def test_hat_hexagon_identity(b):
    p = hat_params(b)
    assert p.edge_length**2 * 3 * math.sqrt(3) / 2 == pytest.approx(p.area_growth, rel=1e-14)


@pytest.mark.parametrize("b", [0, -1, 1, 1.0 + 1e-13])
def test_hat_params_invalid(b):
    with pytest.raises(InvalidB):
        hat_params(b)


def test_penrose_estimate_with_candidate():
    spec = penrose()
    patch = dual_tiling(spec, 25)
    _, rep = estimate_growth_form(patch, patch.nearest_tile(patch.center), [5, 10, 20], growth_form_formula_2d(spec))
    assert rep.d_to_candidate[0] > rep.d_to_candidate[-1]
    assert rep.fitted_C > 0
    assert set(rep.to_dict()) == {"schema", "n", "shell_sizes", "d_successive", "d_to_candidate", "fitted_C"}
