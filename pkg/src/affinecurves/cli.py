"""Command-line interface.

Subcommands: thresholds, curve, classify, verify, mc-check. Models are given
either inline (--model KIND with its parameter flags) or as a JSON spec file
(--model-file). All outputs are UTF-8 with LF line endings; CSV uses
17-significant-digit decimals, JSON the shortest round-trip float form.

Exit codes: 0 success, 2 usage or validation error, 3 no negative root
(zero quasi-mean-reversion), 4 short rate outside the state space,
5 verification disagreement, 6 Monte Carlo z-score failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import nullcontext

from .errors import (
    AffineCurvesError,
    NoNegativeRootError,
    OutOfStateSpaceError,
)
from .models import (
    AffineModel,
    CirParams,
    GammaOuParams,
    VasicekParams,
    load_model_file,
    make_cir,
    make_gamma_ou,
    make_vasicek,
)
from .montecarlo import mc_check_with_retry
from .oracle import random_model, verify_model
from .riccati import CurveKind, default_grid, forward_curve, solve_ab, write_curve_csv, yield_curve
from .rng import derive_seed
from .classifier import classification_dict
from .thresholds import compute_thresholds

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_ROOT = 3
EXIT_STATE_SPACE = 4
EXIT_VERIFY_FAILED = 5
EXIT_MC_FAILED = 6

_PARAM_FLAGS = {
    "vasicek": ("lambda_", "theta", "sigma"),
    "cir": ("a", "theta", "sigma"),
    "gamma_ou": ("lambda_", "k", "theta"),
}
_FLAG_NAMES = {"lambda_": "--lambda", "theta": "--theta", "sigma": "--sigma",
               "a": "--a", "k": "--k"}


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--model", choices=sorted(_PARAM_FLAGS),
                   help="built-in model kind with inline parameters")
    g.add_argument("--model-file", help="path to a model spec JSON file")
    g.add_argument("--lambda", dest="lambda_", type=float,
                   help="mean-reversion / decay rate (vasicek, gamma_ou)")
    g.add_argument("--theta", type=float, help="long-run mean or jump mean")
    g.add_argument("--sigma", type=float, help="volatility (vasicek, cir)")
    g.add_argument("--a", type=float, help="mean-reversion speed (cir)")
    g.add_argument("--k", type=float, help="jump shape parameter (gamma_ou)")


def _model_from_args(parser: argparse.ArgumentParser,
                     args: argparse.Namespace) -> AffineModel:
    if bool(args.model) == bool(args.model_file):
        parser.error("exactly one of --model or --model-file is required")
    if args.model_file:
        for attr in ("lambda_", "theta", "sigma", "a", "k"):
            if getattr(args, attr) is not None:
                parser.error(f"{_FLAG_NAMES[attr]} conflicts with --model-file")
        return load_model_file(args.model_file)

    wanted = _PARAM_FLAGS[args.model]
    missing = [_FLAG_NAMES[f] for f in wanted if getattr(args, f) is None]
    extra = [_FLAG_NAMES[f] for f in ("lambda_", "theta", "sigma", "a", "k")
             if f not in wanted and getattr(args, f) is not None]
    if missing:
        parser.error(f"{args.model} requires {', '.join(missing)}")
    if extra:
        parser.error(f"{args.model} does not take {', '.join(extra)}")
    if args.model == "vasicek":
        return make_vasicek(VasicekParams(args.lambda_, args.theta, args.sigma))
    if args.model == "cir":
        return make_cir(CirParams(args.a, args.theta, args.sigma))
    return make_gamma_ou(GammaOuParams(args.lambda_, args.k, args.theta))


def _open_output(path: str | None):
    if path is None or path == "-":
        return nullcontext(sys.stdout)
    return open(path, "w", encoding="utf-8", newline="\n")


def _emit_json(obj, path: str | None) -> None:
    with _open_output(path) as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def cmd_thresholds(parser, args) -> int:
    m = _model_from_args(parser, args)
    th = compute_thresholds(m, tol=args.tol)
    _emit_json(th.as_dict(), args.output)
    return EXIT_OK


def cmd_curve(parser, args) -> int:
    m = _model_from_args(parser, args)
    if args.x_max <= 0:
        parser.error(f"--x-max must be positive, got {args.x_max}")
    if not (0 < args.x_min < args.x_max):
        parser.error("--x-min must lie in (0, x_max)")
    if args.points < 2:
        parser.error("--points must be at least 2")
    ab = solve_ab(m, args.x_max)
    xs = default_grid(args.x_max, args.points, args.x_min)
    build = yield_curve if args.kind == "yield" else forward_curve
    curve = build(m, args.r, ab, xs)
    if args.format == "csv":
        with _open_output(args.output) as fh:
            write_curve_csv(curve, fh)
    else:
        _emit_json({
            "kind": curve.kind.value,
            "r": args.r,
            "x": list(curve.xs),
            "value": list(curve.values),
        }, args.output)
    return EXIT_OK


def cmd_classify(parser, args) -> int:
    m = _model_from_args(parser, args)
    th = compute_thresholds(m)
    _emit_json(classification_dict(th, args.r), args.output)
    return EXIT_OK


def cmd_verify(parser, args) -> int:
    if args.n_models < 1:
        parser.error(f"--n-models must be at least 1, got {args.n_models}")
    if args.n_r < 1:
        parser.error(f"--n-r must be at least 1, got {args.n_r}")
    if args.exclusion < 0:
        parser.error("--exclusion must be non-negative")
    rows = disagreements = skipped = 0
    with _open_output(args.output) as fh:
        for i in range(args.n_models):
            model_seed = derive_seed(args.seed, i)
            m = random_model(model_seed, kind=args.kind)
            report = verify_model(
                m, n_r=args.n_r, exclusion=args.exclusion,
                seed=derive_seed(model_seed, 1),
            )
            for line in report.json_lines():
                fh.write(line + "\n")
            rows += len(report.rows)
            skipped += len(report.skipped)
            disagreements += len(report.disagreements())
        fh.write(json.dumps({
            "summary": True,
            "models": args.n_models,
            "rows": rows,
            "skipped": skipped,
            "pass": rows - disagreements,
            "fail": disagreements,
        }) + "\n")
    return EXIT_OK if disagreements == 0 else EXIT_VERIFY_FAILED


def cmd_mc_check(parser, args) -> int:
    m = _model_from_args(parser, args)
    n_steps = args.n_steps if args.n_steps is not None else max(50, int(200 * args.x))
    result, _ = mc_check_with_retry(
        m, args.r0, args.x, args.n_paths, n_steps, args.seed
    )
    _emit_json(result, args.output)
    return EXIT_OK if abs(result["z_score"]) <= 3.0 else EXIT_MC_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affinecurves",
        description="Yield and forward curve shapes in affine one-factor "
                    "short-rate models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thresholds", help="print the shape threshold bundle")
    _add_model_flags(p)
    p.add_argument("--tol", type=float, default=1e-12,
                   help="absolute quadrature tolerance for b_y_norm")
    p.add_argument("--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("curve", help="emit a sampled yield or forward curve")
    _add_model_flags(p)
    p.add_argument("--r", type=float, required=True, help="current short rate")
    p.add_argument("--kind", choices=[k.value for k in CurveKind],
                   default="yield")
    p.add_argument("--x-max", type=float, default=30.0)
    p.add_argument("--x-min", type=float, default=1e-4)
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("classify", help="classify both curve shapes at a rate")
    _add_model_flags(p)
    p.add_argument("--r", type=float, required=True, help="current short rate")
    p.add_argument("--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify",
                       help="random-model sweep comparing thresholds vs oracle")
    p.add_argument("--n-models", type=int, required=True)
    p.add_argument("--n-r", type=int, default=20,
                   help="rates sampled per model")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exclusion", type=float, default=1e-4,
                   help="relative half-width of the skip zone around each "
                        "threshold; 0 disables skipping and may flag "
                        "boundary rows (unsupported)")
    p.add_argument("--kind", choices=sorted(_PARAM_FLAGS),
                   help="restrict generation to one model kind")
    p.add_argument("--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mc-check",
                       help="Monte Carlo bond price vs the affine formula")
    _add_model_flags(p)
    p.add_argument("--r0", type=float, required=True, help="initial short rate")
    p.add_argument("--x", type=float, required=True, help="maturity in years")
    p.add_argument("--n-paths", type=int, default=100_000)
    p.add_argument("--n-steps", type=int, default=None,
                   help="time steps (default 200 per year, min 50 per year)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_mc_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(parser, args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except NoNegativeRootError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_ROOT
    except OutOfStateSpaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STATE_SPACE
    except (AffineCurvesError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
