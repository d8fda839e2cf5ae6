"""File writers: patch/form JSON, SVG renders, OFF polyhedra, coordination CSV."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .periodic import GrowthForm
from .tiling import Patch

ODD_FILL = "#7ac36a"  # odd shells green
EVEN_FILL = "#f5d949"  # even shells yellow
OTHER_FILL = "#eeeeee"


def _r(x, nd=9):
    """Round for stable text output; avoids ``-0.0``."""
    return np.round(np.asarray(x, dtype=float), nd) + 0.0


def dumps(data, compact: bool = False) -> str:
    if compact:
        return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def write_json(path, data, compact: bool = False) -> None:
    Path(path).write_text(dumps(data, compact))


def patch_to_dict(patch: Patch, shell_index=None) -> dict:
    tiles = []
    for k, t in enumerate(patch.tiles):
        rec = {"id": t.id, "label": t.label, "vertices": _r(t.vertices).tolist(), "neighbors": patch.neighbors(k).tolist()}
        if shell_index is not None and shell_index[k] >= 0:
            rec["shell"] = int(shell_index[k])
        tiles.append(rec)
    return {
        "schema": 1,
        "kind": "patch",
        "dim": patch.dim,
        "rule": patch.rule.kind,
        "guard_radius": None if not np.isfinite(patch.guard_radius) else float(_r(patch.guard_radius)),
        "center": _r(patch.center).tolist(),
        "n_tiles": len(patch.tiles),
        "labels": sorted(set(patch.labels)),
        "tiles": tiles,
    }


def form_to_dict(form: GrowthForm) -> dict:
    d = form.to_dict()
    d["vertices"] = _r(d["vertices"]).tolist()
    return d


def _fmt(x) -> str:
    return f"{float(x):.6g}"


def patch_svg(patch: Patch, shell_index=None, width: int = 800) -> str:
    """2D patch render; tiles with a shell index are coloured by its parity."""
    if patch.dim != 2:
        raise ValueError("SVG output is 2D only")
    allv = np.vstack([t.vertices for t in patch.tiles])
    lo, hi = allv.min(axis=0), allv.max(axis=0)
    scale = width / max(hi[0] - lo[0], hi[1] - lo[1], 1e-12)
    h = (hi[1] - lo[1]) * scale
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{_fmt(h)}" '
        f'viewBox="0 0 {width} {_fmt(h)}">'
    ]
    for k, t in enumerate(patch.tiles):
        p = (t.vertices - lo) * scale
        pts = " ".join(f"{_fmt(x)},{_fmt(h - y)}" for x, y in p)
        s = -1 if shell_index is None else int(shell_index[k])
        fill = OTHER_FILL if s < 0 else (ODD_FILL if s % 2 else EVEN_FILL)
        out.append(f'<polygon points="{pts}" fill="{fill}" stroke="#333" stroke-width="0.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def form_svg(form: GrowthForm, shells_scaled=None, width: int = 400) -> str:
    """A 2D growth form outline, optionally over scaled shell point clouds."""
    if form.dim != 2:
        raise ValueError("SVG output is 2D only")
    r = max(form.circumradius, 1e-12) * 1.1
    if shells_scaled:
        r = max(r, max(float(np.abs(p).max()) for p in shells_scaled) * 1.05)
    s = width / (2 * r)

    def tr(p):
        return (p[0] + r) * s, (r - p[1]) * s

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{width}" viewBox="0 0 {width} {width}">']
    for k, pts in enumerate(shells_scaled or []):
        fill = ODD_FILL if k % 2 else EVEN_FILL
        for p in pts:
            x, y = tr(p)
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="1.5" fill="{fill}"/>')
    poly = " ".join("{},{}".format(*map(_fmt, tr(v))) for v in form.vertices)
    out.append(f'<polygon points="{poly}" fill="none" stroke="#c0392b" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def form_off(form: GrowthForm) -> str:
    """OFF text for a 3D form."""
    if form.dim != 3:
        raise ValueError("OFF output is 3D only")
    poly = form.shape
    lines = ["OFF", f"{len(poly.vertices)} {len(poly.faces)} {poly.n_edges}"]
    lines += [" ".join(_fmt(c) for c in _r(v)) for v in poly.vertices]
    lines += [" ".join(str(i) for i in (len(f), *f)) for f in poly.faces]
    return "\n".join(lines) + "\n"


def coordination_csv(sizes) -> str:
    """``n,count`` rows for ``n >= 1``."""
    return "n,count\n" + "".join(f"{n},{c}\n" for n, c in enumerate(sizes) if n >= 1)
