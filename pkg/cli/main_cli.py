import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from cli import commands
from cli.cli_config import RunConfig
from shared.errors import ParetoGeoError

logger = logging.getLogger("cli.main")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (value > 0) or value == float("inf"):
        raise argparse.ArgumentTypeError(f"must be a positive finite real, got {text!r}")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="output_format", choices=("json", "csv"), default=None,
                        help="Output format for summaries (default from PARETOGEO_OUTPUT_FORMAT)")
    common.add_argument("--seed", type=int, default=None, help="Seed for the Philox generator")
    common.add_argument("--reference", type=str, default=None,
                        help="Reference parameters 'alpha,beta' that distances are measured against")
    common.add_argument("--precision", type=int, default=None, help="Decimals in printed numbers")
    common.add_argument("--tolerance", type=positive_float, default=None, help="Absolute quadrature tolerance")
    common.add_argument("--debug", action="store_true", help="Enable debug logging")

    parser = argparse.ArgumentParser(
        prog="paretogeo",
        description="Fisher-Rao geometry and Jeffreys-prior inference for the Pareto distribution",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", parents=[common], help="Draw a seeded Pareto sample")
    p.add_argument("--alpha", type=positive_float, required=True)
    p.add_argument("--beta", type=positive_float, required=True)
    p.add_argument("--n", type=positive_int, required=True)
    p.add_argument("--out", required=True, help="Sample file to write (one value per line)")

    p = sub.add_parser("fit", parents=[common], help="Estimator table for a sample file")
    p.add_argument("input")
    p.add_argument("--known-alpha", type=positive_float, default=None)
    p.add_argument("--known-beta", type=positive_float, default=None)

    p = sub.add_parser("simulate", parents=[common], help="Sample at (alpha, beta), then fit")
    p.add_argument("--alpha", type=positive_float, required=True)
    p.add_argument("--beta", type=positive_float, required=True)
    p.add_argument("--n", type=positive_int, default=100)
    p.add_argument("--out", default=None, help="Also keep the drawn sample in this file")

    p = sub.add_parser("distance", parents=[common], help="Fisher-Rao distance between two Pareto laws")
    for name in ("a0", "b0", "a1", "b1"):
        p.add_argument(name, type=positive_float)

    p = sub.add_parser("geodesic", parents=[common], help="Geodesic endpoint, closed form vs RK4")
    p.add_argument("--alpha", type=positive_float, default=1.0)
    p.add_argument("--beta", type=positive_float, default=1.0)
    p.add_argument("--theta", type=float, default=0.0, help="Initial angle in the half-plane")
    p.add_argument("--t", type=float, default=1.0, help="Arc length")
    p.add_argument("--steps", type=positive_int, default=1000)

    p = sub.add_parser("ball", parents=[common], help="Geodesic ball as CSV polylines")
    p.add_argument("--alpha", type=positive_float, default=1.0)
    p.add_argument("--beta", type=positive_float, default=1.0)
    p.add_argument("--radius", type=positive_float, default=1.0)
    p.add_argument("--rays", type=positive_int, default=32)
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--out", default=None)

    p = sub.add_parser("curves", parents=[common], help="Posterior and predictive density curves as CSV")
    p.add_argument("input")
    p.add_argument("--kind", choices=commands.CURVE_KINDS, required=True)
    p.add_argument("--grid", default=None, help="start:stop:count or log:start:stop:count")
    p.add_argument("--beta-grid", default=None, help="Second axis for --kind joint")
    p.add_argument("--out", default=None)

    p = sub.add_parser("check", parents=[common], help="Normalization and bounds checks for a sample file")
    p.add_argument("input")
    p.add_argument("--known-alpha", type=positive_float, default=None)
    p.add_argument("--known-beta", type=positive_float, default=None)

    return parser


def _run_config(args) -> RunConfig:
    overrides = {
        name: getattr(args, name)
        for name in ("seed", "output_format", "tolerance", "precision", "reference")
        if getattr(args, name, None) is not None
    }
    if getattr(args, "input", None):
        overrides["input_path"] = args.input
    return RunConfig(**overrides)


def dispatch(args, run_cfg: RunConfig) -> None:
    if args.command == "sample":
        commands.cmd_sample(args.alpha, args.beta, args.n, args.out, run_cfg)
    elif args.command == "fit":
        commands.cmd_fit(args.input, args.known_alpha, args.known_beta, run_cfg)
    elif args.command == "simulate":
        commands.cmd_simulate(args.alpha, args.beta, args.n, args.reference, args.out, run_cfg)
    elif args.command == "distance":
        commands.cmd_distance(args.a0, args.b0, args.a1, args.b1, run_cfg)
    elif args.command == "geodesic":
        commands.cmd_geodesic(args.alpha, args.beta, args.theta, args.t, args.steps, run_cfg)
    elif args.command == "ball":
        commands.cmd_ball(args.alpha, args.beta, args.radius, args.rays, args.steps, args.out, run_cfg)
    elif args.command == "curves":
        commands.cmd_curves(args.input, args.kind, args.grid, args.beta_grid, args.out, run_cfg)
    elif args.command == "check":
        commands.cmd_check(args.input, args.known_alpha, args.known_beta, run_cfg)
    else:
        raise ValueError(f"unknown command {args.command!r}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    if args.debug:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        run_cfg = _run_config(args)
    except ValueError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        dispatch(args, run_cfg)
    except (ParetoGeoError, ValidationError, ValueError, OSError) as e:
        logger.debug(f"{args.command} failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
