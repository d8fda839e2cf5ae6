from __future__ import annotations

import math

import numpy as np
import pytest

from tilegrow.analysis import estimate_growth_form
from tilegrow.errors import DegenerateTriple, NumericallySingular, ParallelGridVectors
from tilegrow.geom import convex_hausdorff
from tilegrow.gridform import (
    growth_form_formula_2d,
    growth_form_formula_3d,
    growth_form_orthoplex,
    tables_2d,
    tables_3d,
)
from tilegrow.multigrid import GridSpec, ammann3d, dual_tiling, hexagrid, ortho2, ortho3, penrose, random_grid
from tilegrow.periodic import growth_form_periodic, square44


def _vertex_set(form, nd=9):
    return {tuple(np.round(v, nd) + 0.0) for v in form.vertices}


def test_tables_ortho2():
    t = tables_2d(ortho2())
    assert t.delta[0, 1] == pytest.approx(1.0)
    assert t.Delta[0] == pytest.approx(1.0)
    assert t.eps[0, 1] == 1 and t.eps[1, 0] == -1
    assert np.allclose(t.upsilon[0], (0, 1))


def test_tables_pentagrid_and_hexagrid():
    t = tables_2d(penrose())
    vals = {round(v, 9) for v in t.delta.values()}
    assert vals == {round(1 / math.sin(math.radians(72)), 9), round(1 / math.sin(math.radians(36)), 9)}
    h = tables_2d(hexagrid())
    assert all(v == pytest.approx(2 / math.sqrt(3)) for v in h.delta.values())
    assert all(v == pytest.approx(math.sqrt(3)) for v in h.Delta.values())
    for (i, j), e in t.eps.items():
        assert e == -t.eps[j, i]


def test_tables_3d_invariants():
    t = tables_3d(ammann3d())
    for (i, j), h in t.h.items():
        assert np.allclose(h, -t.h[j, i])
    assert all(d >= 1 - 1e-12 and np.isfinite(d) for d in t.delta.values())
    assert all(v > 0 for v in t.Delta.values())


def test_formula_ortho_forms():
    diamond = {(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)}
    assert _vertex_set(growth_form_formula_2d(ortho2())) == diamond
    assert _vertex_set(growth_form_orthoplex(ortho2())) == diamond
    assert _vertex_set(growth_form_formula_2d(ortho2())) == _vertex_set(growth_form_periodic(square44()))
    octa = {tuple(v) for v in np.vstack([np.eye(3), -np.eye(3)]) + 0.0}
    assert _vertex_set(growth_form_formula_3d(ortho3())) == octa
    assert _vertex_set(growth_form_orthoplex(ortho3())) == octa


def test_pentagrid_decagon():
    f = growth_form_formula_2d(penrose())
    r = np.linalg.norm(f.vertices, axis=1)
    assert len(f.vertices) == 10 and np.ptp(r) < 1e-12
    assert convex_hausdorff(f.vertices, growth_form_orthoplex(penrose()).vertices) < 1e-9


def test_hexagrid_hexagon():
    f = growth_form_formula_2d(hexagrid())
    assert len(f.vertices) == 6
    assert np.allclose(np.linalg.norm(f.vertices, axis=1), math.sqrt(3) / 2)
    assert convex_hausdorff(f.vertices, growth_form_orthoplex(hexagrid()).vertices) < 1e-9


def test_ammann_icosidodecahedron():
    f = growth_form_formula_3d(ammann3d())
    assert len(f.vertices) == 30
    assert f.shape.euler_characteristic() == 2
    assert f.circumradius == pytest.approx(math.sqrt(5 - 2 * math.sqrt(5)), abs=1e-9)
    assert convex_hausdorff(f.vertices, growth_form_orthoplex(ammann3d()).vertices) < 1e-7


def test_cross_method_random():
    rng = np.random.default_rng(99)
    for n, d in [(3, 2), (4, 2), (6, 2), (4, 3), (6, 3)] * 4:
        spec = random_grid(n, d, rng)
        a = growth_form_formula_2d(spec) if d == 2 else growth_form_formula_3d(spec)
        b = growth_form_orthoplex(spec)
        assert convex_hausdorff(a.vertices, b.vertices) < 1e-7
        assert a.is_centrosymmetric() and b.is_centrosymmetric()


def test_rotation_equivariance():
    th = 0.37
    rot = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    spec = penrose()
    a = growth_form_formula_2d(spec).vertices @ rot.T
    b = growth_form_formula_2d(spec.rotated(rot)).vertices
    assert convex_hausdorff(a, b) < 1e-9


def test_errors():
    with pytest.raises(ParallelGridVectors):
        tables_2d(GridSpec([[1, 0], [-1, 0], [0, 1]], [0.1, 0.2, 0.3]))
    # coplanar vectors: no pair line ever crosses a third family
    s = 1 / math.sqrt(2)
    with pytest.raises(DegenerateTriple):
        tables_3d(GridSpec([[1, 0, 0], [0, 1, 0], [s, s, 0]], [0.1] * 3))
    with pytest.raises(NumericallySingular):
        growth_form_orthoplex(GridSpec([[1, 0], [1, 1e-9], [1, -1e-9]], [0.1, 0.2, 0.3]))


def test_empirical_agreement_pentagrid():
    spec = penrose()
    form = growth_form_formula_2d(spec)
    patch = dual_tiling(spec, 30)
    seed = patch.nearest_tile(patch.center)
    _, rep = estimate_growth_form(patch, seed, [8, 16, 24], candidate=form)
    d = rep.d_to_candidate
    assert d[0] > d[1] > d[2]
    assert all(x <= 2 * rep.fitted_C / n for x, n in zip(d, rep.n))
