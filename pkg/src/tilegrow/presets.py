"""Named tilings stored as JSON files under ``presets/``."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist

from . import multigrid, periodic, substitution
from .errors import InvalidSpec
from .multigrid import GridSpec, dual_tiling
from .periodic import PeriodicSpec, unroll
from .substitution import SubstitutionSystem, disc_patch, strips_seed, strips_tiling
from .tiling import EDGE_SHARE, with_rule

PRESET_NAMES = (
    "square44",
    "hex63",
    "tri36",
    "arch3344",
    "penrose",
    "hexagrid",
    "ortho2",
    "ortho3",
    "ammann3d",
    "chair",
    "ltetromino",
    "strips",
)


@dataclass(frozen=True)
class StripsSpec:
    levels: int = 5
    half_height: int = 530
    left: int = 270
    right: int = 530
    name: str = "strips"

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "strips",
            "name": self.name,
            "levels": self.levels,
            "half_height": self.half_height,
            "left": self.left,
            "right": self.right,
        }


def spec_from_dict(data: dict):
    """Build a PeriodicSpec, GridSpec, SubstitutionSystem or StripsSpec from JSON data."""
    if not isinstance(data, dict):
        raise InvalidSpec("InvalidSpec: top-level JSON must be an object")
    kind = data.get("kind")
    if kind is None:
        # bare schemas from the interface docs
        kind = "periodic" if "basis" in data else "grid" if "vectors" in data else None
    try:
        if kind == "periodic":
            return PeriodicSpec.from_dict(data)
        if kind == "grid":
            return GridSpec.from_dict(data)
        if kind == "substitution":
            return SubstitutionSystem.from_dict(data)
        if kind == "strips":
            fields = {k: data[k] for k in ("levels", "half_height", "left", "right", "name") if k in data}
            return StripsSpec(**fields)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidSpec):
            raise
        raise InvalidSpec(f"InvalidSpec: malformed {kind} spec ({exc})") from exc
    raise InvalidSpec(f"InvalidSpec: unknown spec kind {kind!r}")


def load_spec(path):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"InvalidSpec: {path} is not valid JSON ({exc})") from exc
    return spec_from_dict(data)


def load_preset(name: str):
    if name not in PRESET_NAMES:
        raise InvalidSpec(f"InvalidSpec: unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    text = resources.files("tilegrow").joinpath("presets", f"{name}.json").read_text()
    return spec_from_dict(json.loads(text))


def _build_all() -> dict:
    out = {}
    for name in ("square44", "hex63", "tri36", "arch3344"):
        out[name] = periodic.LIBRARY[name]().to_dict()
    for name, fn in multigrid.PRESETS.items():
        out[name] = fn().to_dict()
    out["chair"] = substitution.chair_system().to_dict()
    out["ltetromino"] = substitution.l_tetromino_system().to_dict()
    out["strips"] = StripsSpec().to_dict()
    return out


def write_presets(directory) -> None:
    """Regenerate the preset JSON files from the Python constructors."""
    directory = Path(directory)
    for name, data in _build_all().items():
        (directory / f"{name}.json").write_text(json.dumps(data, indent=1) + "\n")


def _max_diameter(vertices_list) -> float:
    return max(float(pdist(v).max()) for v in vertices_list)


def build_patch(spec, reach: float | None = None, radius: float | None = None, rule=None):
    """A patch whose guard band has at least radius ``reach`` around its centre.

    ``radius`` instead passes the generator's own size parameter straight
    through (unroll radius, grid region radius, clip-disc radius).  Strips
    patches always use the window stored in the spec.
    """
    rule = EDGE_SHARE if rule is None else rule
    if isinstance(spec, StripsSpec):
        patch = strips_tiling(spec.levels, spec.half_height, spec.left, spec.right)
        return patch if rule is EDGE_SHARE else with_rule(patch, rule)
    if reach is None and radius is None:
        raise ValueError("give reach or radius")
    if isinstance(spec, PeriodicSpec):
        if radius is None:
            radius = max(reach + 2 * spec.max_tile_diameter(), 2 * spec.fundamental_diameter() + 1e-6)
        return unroll(spec, radius, rule)
    if isinstance(spec, GridSpec):
        if radius is None:
            sigma = float(np.linalg.svd(spec.gram(), compute_uv=False).min())
            radius = (reach + spec.N / 2 + 3 * spec.d) / sigma
        patch = dual_tiling(spec, radius)
        return patch if rule is EDGE_SHARE else with_rule(patch, rule)
    if isinstance(spec, SubstitutionSystem):
        seed = next(iter(spec.prototiles))
        if radius is None:
            radius = reach + 3 * _max_diameter(spec.prototiles.values())
        return disc_patch(spec, seed, radius, rule)
    raise InvalidSpec(f"InvalidSpec: cannot build a patch from {type(spec).__name__}")


def default_seed(spec, patch) -> int:
    if isinstance(spec, StripsSpec):
        return strips_seed(patch)
    return patch.nearest_tile(patch.center)
