"""Regenerate the pinned regression thresholds in this directory.

Shell counts come from the cell-rasterization oracle in ``tests/oracles.py``;
the library BFS is checked against it before anything is written.

    python3 tests/golden/make_golden.py
"""
from __future__ import annotations

import json
import pathlib
import sys

HERE = pathlib.Path(__file__).resolve().parent
sys.path.insert(0, str(HERE.parent))

from oracles import bfs_layers, polyomino_adjacency  # noqa: E402

from tilegrow.analysis import detect_no_growth_form, nonconvexity_measure  # noqa: E402
from tilegrow.substitution import disc_patch, l_tetromino_system, strips_seed, strips_tiling  # noqa: E402
from tilegrow.tiling import shells  # noqa: E402

L_RADIUS = 580
L_SHELL = 255
STRIPS = dict(levels=5, half_height=530, left=270, right=530)
STRIPS_N = [16, 23, 32, 45, 64, 91, 128, 181, 256]


def ltetromino():
    patch = disc_patch(l_tetromino_system(), "L", L_RADIUS)
    seed = patch.nearest_tile(patch.center)
    adj = polyomino_adjacency(patch.tiles)
    layers = bfs_layers(adj, [seed], L_SHELL)
    sd = shells(patch, [seed], L_SHELL)
    assert set(sd.shells[L_SHELL]) == layers[L_SHELL], "library BFS disagrees with the oracle"
    ids = sorted(layers[L_SHELL])
    pts = (patch.centroids[ids] - patch.centroids[seed]) / L_SHELL
    value = nonconvexity_measure(pts)
    return {
        "radius": L_RADIUS,
        "shell": L_SHELL,
        "seed_centroid": patch.centroids[seed].tolist(),
        "shell_count": len(ids),
        "paper_shell_count": 1651,
        "nonconvexity": value,
        "t0": value / 2,
    }


def strips():
    patch = strips_tiling(**STRIPS)
    seed = strips_seed(patch)
    rep = detect_no_growth_form(patch, seed, STRIPS_N)
    return {**STRIPS, "n": STRIPS_N, "ratio": rep.ratio, "variation": rep.variation, "g0": rep.variation / 2}


if __name__ == "__main__":
    for name, fn in [("ltetromino_p255.json", ltetromino), ("strips_gap.json", strips)]:
        data = fn()
        (HERE / name).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        print(name, json.dumps(data))
