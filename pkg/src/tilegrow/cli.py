"""``tilegrow`` command line: generate patches, compute growth forms, analyze shells."""
from __future__ import annotations

import argparse
import itertools
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, export
from .analysis import detect_no_growth_form, estimate_growth_form, fit_square, nonconvexity_measure, scaled_shells
from .errors import GuardBandExceeded, InsufficientSamples, MethodMismatch, TilingError
from .geom import convex_hausdorff, convex_hull_2d
from .gridform import growth_form_formula_2d, growth_form_formula_3d, growth_form_orthoplex
from .multigrid import GridSpec
from .periodic import GrowthForm, PeriodicSpec, Provenance, growth_form_heesch, growth_form_periodic, square44
from .presets import PRESET_NAMES, StripsSpec, build_patch, default_seed, load_preset, load_spec
from .substitution import SubstitutionSystem
from .tiling import check_overlaps, rule_from_name, shell_index_array, shells

EXIT_OK, EXIT_SPEC, EXIT_METHOD, EXIT_GUARD = 0, 2, 3, 4

METHODS = ("algorithm1", "heesch", "formula2d", "formula3d", "orthoplex")

# half the r(n) oscillation observed on the strips preset over n = 16..256
STRIPS_GAP = 0.126


@dataclass
class RunConfig:
    command: str
    preset: str | None = None
    spec_path: str | None = None
    shells: list = field(default_factory=list)
    rule: str = "edge"
    radius: float | None = None
    out: str | None = None
    svg: str | None = None
    off: str | None = None
    csv: str | None = None
    method: str = "all"
    threads: int = 1
    gap: float = STRIPS_GAP

    def validate(self):
        if (self.preset is None) == (self.spec_path is None):
            raise SystemExit("exactly one of --preset and --spec is required")
        if any(n < 1 for n in self.shells):
            raise SystemExit("shell indices must be >= 1")


def parse_shells(text: str) -> list:
    """``8,16,24`` or ``a..b`` (powers of sqrt 2 from a up to b, rounded)."""
    text = text.strip()
    if ".." in text:
        lo, hi = (int(x) for x in text.split(".."))
        if lo < 1 or hi < lo:
            raise argparse.ArgumentTypeError(f"bad shell range {text!r}")
        out, k = [], 0
        while True:
            n = int(round(lo * math.sqrt(2) ** k))
            if n > hi:
                break
            out.append(n)
            k += 1
        if out[-1] != hi:
            out.append(hi)
        return sorted(set(out))
    try:
        vals = sorted(set(int(x) for x in text.split(",") if x))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad shell list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty shell list")
    return vals


def _threads(value) -> int:
    if value is not None:
        return max(1, int(value))
    return max(1, int(os.environ.get("TILEGROW_THREADS", "1")))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tilegrow", description="Growth forms of tilings.")
    ap.add_argument("--version", action="version", version=f"tilegrow {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--preset", choices=PRESET_NAMES)
        src.add_argument("--spec", dest="spec_path", help="JSON spec file")
        p.add_argument("--rule", choices=("edge", "heesch"), default="edge", help="neighbour rule")
        p.add_argument("--threads", type=int, default=None, help="worker cap (env TILEGROW_THREADS)")
        p.add_argument("--out", help="JSON output path (default: stdout)")

    g = sub.add_parser("generate", help="write a patch")
    common(g)
    g.add_argument("--radius", type=float, default=10.0, help="generator size parameter")
    g.add_argument("--shells", type=int, default=None, help="colour shells up to this index in the SVG")
    g.add_argument("--svg")

    f = sub.add_parser("growthform", help="compute a growth form")
    common(f)
    f.add_argument("--method", choices=METHODS + ("all",), default="all")
    f.add_argument("--svg")
    f.add_argument("--off")

    a = sub.add_parser("analyze", help="scaled shells and convergence report")
    common(a)
    a.add_argument("--shells", type=parse_shells, required=True, help="e.g. 8,16,24 or 16..256")
    a.add_argument("--radius", type=float, default=None, help="generator size parameter (default: automatic)")
    a.add_argument("--gap", type=float, default=STRIPS_GAP, help="r(n) range that flags non-convergence")
    a.add_argument("--svg")
    a.add_argument("--csv")
    return ap


def _load(cfg: RunConfig):
    spec = load_preset(cfg.preset) if cfg.preset else load_spec(cfg.spec_path)
    if isinstance(spec, (PeriodicSpec, GridSpec)):
        spec.validate()
    return spec


def _emit(cfg: RunConfig, data, compact: bool = False) -> None:
    text = export.dumps(data, compact)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _applicable(spec) -> list:
    if isinstance(spec, PeriodicSpec):
        return ["algorithm1", "heesch"]
    if isinstance(spec, GridSpec):
        return ["formula2d" if spec.d == 2 else "formula3d", "orthoplex"]
    return []


def _form(spec, method: str, threads: int):
    if method == "algorithm1":
        return growth_form_periodic(spec, threads=threads)
    if method == "heesch":
        return growth_form_heesch(spec)
    if method == "formula2d":
        return growth_form_formula_2d(spec)
    if method == "formula3d":
        return growth_form_formula_3d(spec)
    return growth_form_orthoplex(spec)


def cmd_generate(cfg: RunConfig) -> int:
    spec = _load(cfg)
    rule = rule_from_name(cfg.rule)
    patch = build_patch(spec, radius=cfg.radius, rule=rule)
    if isinstance(spec, PeriodicSpec) and len(patch.tiles) > 1:
        # catches overlaps that only show up between translates
        check_overlaps(patch.tiles)
    idx = None
    if cfg.shells:
        idx = shell_index_array(patch, [default_seed(spec, patch)], cfg.shells[0])
    _emit(cfg, export.patch_to_dict(patch, idx), compact=True)
    if cfg.svg:
        Path(cfg.svg).write_text(export.patch_svg(patch, idx))
    return EXIT_OK


def cmd_growthform(cfg: RunConfig) -> int:
    spec = _load(cfg)
    ok = _applicable(spec)
    if cfg.method == "all":
        methods = ok
        if not methods:
            raise MethodMismatch(f"MethodMismatch: no closed-form method applies to {type(spec).__name__}")
    else:
        if cfg.method not in ok:
            raise MethodMismatch(f"MethodMismatch: {cfg.method} does not apply to {type(spec).__name__}")
        methods = [cfg.method]
    forms = {m: _form(spec, m, cfg.threads) for m in methods}
    if len(methods) == 1:
        data = export.form_to_dict(forms[methods[0]])
    else:
        dist = {
            f"{a}|{b}": float(np.round(convex_hausdorff(forms[a].vertices, forms[b].vertices), 12))
            for a, b in itertools.combinations(methods, 2)
        }
        data = {"schema": 1, "forms": {m: export.form_to_dict(f) for m, f in forms.items()}, "hausdorff": dist}
    _emit(cfg, data)
    main_form = forms[methods[0]]
    if cfg.svg and main_form.dim == 2:
        Path(cfg.svg).write_text(export.form_svg(main_form))
    if cfg.off and main_form.dim == 3:
        Path(cfg.off).write_text(export.form_off(main_form))
    return EXIT_OK


def _step_estimate(patch) -> float:
    return 0.75 * patch.max_diameter()


def _analysis_patch(spec, cfg: RunConfig, rule):
    """Patch large enough for the largest requested shell.

    With ``--radius`` the patch is built as given and a too-small guard band is
    an error; otherwise the size is estimated and grown once on failure.
    """
    n_max = max(cfg.shells)
    if cfg.radius is not None or isinstance(spec, StripsSpec):
        patch = build_patch(spec, radius=cfg.radius, rule=rule)
        seed = default_seed(spec, patch)
        shells(patch, [seed], n_max)
        return patch, seed
    probe = build_patch(spec, reach=4.0, rule=rule)
    step = _step_estimate(probe)
    for factor in (1.0, 2.0 / 0.75, 4.0 / 0.75):
        patch = build_patch(spec, reach=factor * step * n_max + 2 * probe.max_diameter(), rule=rule)
        seed = default_seed(spec, patch)
        try:
            shells(patch, [seed], n_max)
            return patch, seed
        except GuardBandExceeded:
            if factor == 4.0 / 0.75:
                raise
    raise AssertionError("unreachable")


def _candidate(spec, rule):
    if isinstance(spec, PeriodicSpec):
        return growth_form_heesch(spec) if rule.kind == "heesch" else growth_form_periodic(spec)
    if isinstance(spec, GridSpec) and rule.kind == "edge":
        return growth_form_formula_2d(spec) if spec.d == 2 else growth_form_formula_3d(spec)
    return None


def cmd_analyze(cfg: RunConfig) -> int:
    spec = _load(cfg)
    rule = rule_from_name(cfg.rule)
    if isinstance(spec, StripsSpec) and len(cfg.shells) < 2:
        raise InsufficientSamples("InsufficientSamples: need at least two shell indices")
    patch, seed = _analysis_patch(spec, cfg, rule)
    data = {"schema": 1, "preset": cfg.preset, "seed_tile": seed, "n_tiles": len(patch.tiles)}
    if isinstance(spec, StripsSpec):
        rep = detect_no_growth_form(patch, seed, cfg.shells, gap=cfg.gap)
        data["no_growth_form"] = rep.to_dict()
    else:
        candidate = _candidate(spec, rule)
        form, rep = estimate_growth_form(patch, seed, cfg.shells, candidate)
        data["report"] = rep.to_dict()
        data["form"] = export.form_to_dict(form)
        if candidate is not None:
            data["candidate"] = export.form_to_dict(candidate)
        if isinstance(spec, SubstitutionSystem) and patch.dim == 2:
            if spec.name == "chair":
                fit = fit_square(form.vertices, growth_form_periodic(square44()))
                data["square_fit"] = {
                    "n_vertices": fit.n_vertices,
                    "edge_spread": fit.edge_spread,
                    "scale": fit.scale,
                    "hausdorff": fit.hausdorff,
                    "is_square": bool(fit.n_vertices == 4 and fit.edge_spread < 0.05),
                }
            data["nonconvexity"] = nonconvexity_measure(scaled_shells(patch, seed, [max(cfg.shells)])[0])
    data = _round_floats(data)
    _emit(cfg, data)
    if cfg.csv:
        sizes = shells(patch, [seed], max(cfg.shells)).sizes()
        Path(cfg.csv).write_text(export.coordination_csv(sizes))
    if cfg.svg and patch.dim == 2:
        pts = scaled_shells(patch, seed, cfg.shells)
        outline = GrowthForm.from_points(convex_hull_2d(np.vstack(pts[-1:])).vertices, Provenance.EMPIRICAL)
        Path(cfg.svg).write_text(export.form_svg(outline, pts))
    return EXIT_OK


def _round_floats(obj, nd=12):
    if isinstance(obj, float):
        return float(np.round(obj, nd)) + 0.0
    if isinstance(obj, dict):
        return {k: _round_floats(v, nd) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round_floats(v, nd) for v in obj]
    return obj


COMMANDS = {"generate": cmd_generate, "growthform": cmd_growthform, "analyze": cmd_analyze}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    shells_arg = getattr(args, "shells", None)
    if isinstance(shells_arg, int):
        shells_arg = [shells_arg]
    cfg = RunConfig(
        command=args.command,
        preset=args.preset,
        spec_path=args.spec_path,
        shells=shells_arg or [],
        rule=args.rule,
        radius=getattr(args, "radius", None),
        out=args.out,
        svg=getattr(args, "svg", None),
        off=getattr(args, "off", None),
        csv=getattr(args, "csv", None),
        method=getattr(args, "method", "all"),
        threads=_threads(args.threads),
        gap=getattr(args, "gap", STRIPS_GAP),
    )
    cfg.validate()
    try:
        return COMMANDS[cfg.command](cfg)
    except GuardBandExceeded as exc:
        print(f"GuardBandExceeded: {exc}; max safe n = {exc.max_safe_n}", file=sys.stderr)
        return EXIT_GUARD
    except MethodMismatch as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_METHOD
    except (TilingError, ValueError) as exc:
        msg = str(exc)
        name = type(exc).__name__
        print(msg if msg.startswith(name) else f"{name}: {msg}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
