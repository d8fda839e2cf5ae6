"""Independent reference implementations used by the tests."""
from __future__ import annotations

from collections import deque

import numpy as np


def polyomino_cells(vertices) -> set:
    """Unit cells covered by an axis-aligned integer polygon (even-odd test at cell centres)."""
    v = np.round(np.asarray(vertices, dtype=float)).astype(int)
    lo, hi = v.min(axis=0), v.max(axis=0)
    cells = set()
    for x in range(lo[0], hi[0]):
        for y in range(lo[1], hi[1]):
            px, py = x + 0.5, y + 0.5
            inside = False
            for (x1, y1), (x2, y2) in zip(v, np.roll(v, -1, axis=0)):
                if (y1 > py) != (y2 > py) and px < x1 + (py - y1) * (x2 - x1) / (y2 - y1):
                    inside = not inside
            if inside:
                cells.add((x, y))
    return cells


def polyomino_adjacency(tiles) -> list:
    """Neighbour sets from unit-cell rasterization: two tiles touch along an edge
    exactly when some pair of 4-adjacent cells belongs to them."""
    owner = {}
    for k, t in enumerate(tiles):
        v = np.asarray(t.vertices, dtype=float)
        size = np.ptp(v, axis=0)
        if len(v) == 4 and np.isclose(size[0], size[1]) and size[0] > 1:
            # square of side s: rasterize directly
            x0, y0 = np.round(v.min(axis=0)).astype(int)
            s = int(round(size[0]))
            cells = {(x0 + i, y0 + j) for i in range(s) for j in range(s)}
        else:
            cells = polyomino_cells(v)
        for c in cells:
            assert c not in owner, "overlapping tiles"
            owner[c] = k
    adj = [set() for _ in tiles]
    for (x, y), k in owner.items():
        for nb in ((x + 1, y), (x, y + 1)):
            j = owner.get(nb)
            if j is not None and j != k:
                adj[k].add(j)
                adj[j].add(k)
    return adj


def bfs_layers(adj, seeds, n) -> list:
    dist = {s: 0 for s in seeds}
    q = deque(seeds)
    while q:
        u = q.popleft()
        if dist[u] == n:
            continue
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                q.append(w)
    layers = [set() for _ in range(n + 1)]
    for u, d in dist.items():
        layers[d].add(u)
    return layers


def brute_hull_2d(points) -> set:
    """Extreme points by the O(n^3) supporting-line test."""
    p = np.asarray(points, dtype=float)
    out = set()
    for i in range(len(p)):
        for j in range(len(p)):
            if i == j:
                continue
            e = p[j] - p[i]
            cross = e[0] * (p[:, 1] - p[i, 1]) - e[1] * (p[:, 0] - p[i, 0])
            if np.all(cross >= -1e-12):
                # i and j lie on a supporting line; keep the endpoints of that edge
                on = np.abs(cross) <= 1e-12
                t = (p[on] - p[i]) @ e
                pts = p[on]
                out.add(tuple(np.round(pts[np.argmin(t)], 9)))
                out.add(tuple(np.round(pts[np.argmax(t)], 9)))
    return out
