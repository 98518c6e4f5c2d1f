"""Command-line front end: `mmeadapt <command> MAP [options]`.

MAP is a path to a `.map` file or `example:<name>` for a built-in map.
"""
from __future__ import annotations

import argparse
import dataclasses
import math
import sys

import numpy as np

from . import adaptedness as ad
from .config import load_map
from .constructions import GALLERY, LorenzParams, lorenz_family, make_eqadapt
from .errors import MapError
from .intervalmap import prepare, transition_matrix, transitive_component, validate


def _resolve(args) -> tuple:
    src = args.map
    depth = None
    if src.startswith("example:"):
        name = src.split(":", 1)[1]
        if name not in GALLERY:
            raise MapError(f"unknown example {name!r}; choose from {', '.join(sorted(GALLERY))}")
        fmap = GALLERY[name]()
    else:
        fmap, cfg = load_map(src)
        depth = cfg.depth
    overrides = {k: v for k, v in (("eps_markov", args.eps_markov), ("eps_grid", args.eps_grid)) if v is not None}
    if overrides:
        fmap = dataclasses.replace(fmap, **overrides)
    return fmap, args.depth or depth or ad.default_depth()


def _matrix_lines(A) -> list[str]:
    return ["  " + " ".join(str(int(v)) for v in row) for row in np.asarray(A)]


def validation_lines(fmap) -> list[str]:
    rep = validate(fmap)
    out = [f"map: {fmap.name or '(unnamed)'}",
           f"partition: {', '.join(f'{x:.12g}' for x in fmap.partition)}",
           f"expansion lower bound: {rep.lambda_exp:.6g}",
           f"markov mismatch: {rep.markov_mismatch:.3g}",
           "transition matrix:"]
    return out + _matrix_lines(transition_matrix(fmap))


def entropy_lines(fmap) -> list[str]:
    fmap, sing = prepare(fmap)
    seed = sing.branch_index if sing else 0
    comp = transitive_component(fmap, seed)
    return [f"component: {{{', '.join(map(str, comp.symbols))}}}", "component matrix:",
            *_matrix_lines(comp.matrix), f"entropy: {comp.entropy:.15g}"]


def singularity_lines(fmap) -> list[str]:
    _, sing = prepare(fmap)
    if sing is None:
        return ["singularity: none"]
    holder = (f"Hölder exponent {sing.holder.exponent:.6g}, constant {sing.holder.constant:.6g}"
              if sing.holder else "not Hölder")
    return [f"singularity: {sing.location} on interval {sing.branch_index}",
            f"orbit: {' -> '.join(str(p) for p in sing.orbit)} ({sing.orbit_class})",
            f"regularity: {holder}"]


def verdict_lines(v: ad.AdaptednessVerdict) -> list[str]:
    out = [v.line()]
    if v.beta is not None:
        out.append(f"strength: [{v.beta.lower:.6g}, {v.beta.upper:.6g}] ({v.beta.source})")
    if v.band is not None:
        out.append(f"indeterminate band: [{v.band[0]:.6g}, {v.band[1]:.6g}]")
    if v.series is not None:
        out.append(f"series: {v.series.describe()}")
    return out


def dimension_lines(fmap, depth: int) -> list[str]:
    fmap2, sing = prepare(fmap)
    comp = transitive_component(fmap2, sing.branch_index if sing else 0)
    lyap = ad.lyapunov_mme(fmap, series_depth=depth)
    dim = ad.ledrappier_dimension(comp.entropy, lyap)
    return [f"lyapunov: [{lyap.lower:.6g}, {lyap.upper:.6g}]",
            f"dimension: [{dim.lower:.6g}, {dim.upper:.6g}]"]


def analyze_lines(fmap, depth: int, dimension: bool = True) -> list[str]:
    out = validation_lines(fmap) + entropy_lines(fmap) + singularity_lines(fmap)
    _, sing = prepare(fmap)
    if sing is not None:
        out += verdict_lines(ad.classify_mme(fmap, depth=depth))
    if dimension:
        out += dimension_lines(fmap, depth)
    out += [f"note: {n}" for n in fmap.notes]
    return out


def _emit(lines) -> None:
    sys.stdout.write("\n".join(lines) + "\n")


def cmd_validate(args):
    fmap, _ = _resolve(args)
    _emit(validation_lines(fmap))


def cmd_analyze(args):
    fmap, depth = _resolve(args)
    _emit(analyze_lines(fmap, depth))


def cmd_entropy(args):
    fmap, _ = _resolve(args)
    _emit(entropy_lines(fmap))


def cmd_classify(args):
    fmap, depth = _resolve(args)
    v = ad.classify_mme(fmap, depth=depth)
    _emit(verdict_lines(v)[:1] + ([f"series: {v.series.describe()}"] if v.series else []))


def cmd_integral(args):
    fmap, depth = _resolve(args)
    text = ad.integral_bounds(fmap, depth=depth).to_csv()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_dimension(args):
    fmap, depth = _resolve(args)
    _emit(dimension_lines(fmap, depth))


def cmd_example(args):
    if args.name is None:
        _emit(sorted(GALLERY))
        return
    if args.name not in GALLERY:
        raise MapError(f"unknown example {args.name!r}")
    args.map = f"example:{args.name}"
    fmap, depth = _resolve(args)
    lines = analyze_lines(fmap, depth, dimension=args.name != "eqadapt")
    if args.name == "eqadapt":
        ps = make_eqadapt()[1].partial_sums(10**4)
        lines.append(f"analytic series: partial sum {ps[-1]:.15g} at m = 10^4, "
                     f"change since m = 10^3: {ps[-1] - ps[999]:.3g}, so the MME is adapted")
    _emit(lines)


def cmd_lorenz(args):
    params = LorenzParams(args.lambda1, args.lambda2, args.lambda3)
    res = lorenz_family(params, args.scenario, args.period, args.entropy)
    lines = [res.status, f"alpha: {params.alpha:.6g}", f"log alpha: {math.log(params.alpha):.6g}"]
    if res.threshold is not None:
        lines.append(f"threshold n*h: {res.threshold:.6g}")
    if res.sample_status is not None:
        lines.append(f"sample map: {res.sample_status} (rule {res.sample_rule})")
    _emit(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmeadapt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def with_map(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("map", help="path to a .map file or example:<name>")
        p.add_argument("--depth", type=int, default=None, help="series depth (default $MIL_DEPTH or 200)")
        p.add_argument("--eps-markov", type=float, default=None)
        p.add_argument("--eps-grid", type=float, default=None)
        p.set_defaults(func=func)
        return p

    with_map("validate", cmd_validate, "check the Markov, monotone and expanding properties")
    with_map("analyze", cmd_analyze, "full report")
    with_map("entropy", cmd_entropy, "transitive component and its entropy")
    with_map("classify", cmd_classify, "adaptedness of the measure of maximal entropy")
    integ = with_map("integral", cmd_integral, "CSV of series bounds on the log-distance integral")
    integ.add_argument("--output", "-o", default=None)
    with_map("dimension", cmd_dimension, "Lyapunov exponent and dimension brackets")

    ex = sub.add_parser("example", help="analyze a built-in map; no name lists them")
    ex.add_argument("name", nargs="?")
    ex.add_argument("--depth", type=int, default=None)
    ex.set_defaults(func=cmd_example, eps_markov=None, eps_grid=None)

    lz = sub.add_parser("lorenz", help="geometric Lorenz family")
    lz.add_argument("--lambda1", type=float, required=True)
    lz.add_argument("--lambda2", type=float, required=True)
    lz.add_argument("--lambda3", type=float, required=True)
    lz.add_argument("--scenario", choices=["periodic", "nonperiodic"], required=True)
    lz.add_argument("--period", type=int, default=1)
    lz.add_argument("--entropy", type=float, default=None)
    lz.set_defaults(func=cmd_lorenz)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (MapError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
